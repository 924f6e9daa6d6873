export {
	InputError,
	ReasonerError,
	ReasonerSession,
	SessionClosedError,
	assembleProblem,
} from "./session";
export type { LimitOptions, ProblemSpec, SessionOptions } from "./session";
export type {
	AnswerEntry,
	AnswerResponse,
	CheckResponse,
	Proof,
	ProofStats,
	ProofStep,
	ProveResponse,
	Rule,
	Verdict,
} from "./types";
