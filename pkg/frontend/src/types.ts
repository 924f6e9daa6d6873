/** Wire types for the modalprover CLI's --format json output. */

export type Verdict = "proved" | "failed" | "exhausted";
export type AnswerVerdict = "answered" | "failed" | "exhausted";

export type Rule =
	| "input"
	| "I_R"
	| "I_B"
	| "I_O"
	| "promote"
	| "shadow"
	| "unshadow"
	| "factor"
	| "cnf";

export interface ProofStep {
	id: number;
	rule: Rule;
	/** Formula or clause in the problem's s-expression syntax. */
	conclusion: string;
	parents: number[];
	/** Variable-to-term bindings, terms rendered as s-expressions. */
	subst: Record<string, string> | null;
	note: string | null;
}

export interface ProofStats {
	iterations: number;
	clauses_generated: number;
	/** Always null on the wire; timings stay off stdout for determinism. */
	wall_time_ms: number | null;
}

export interface Proof {
	steps: ProofStep[];
	/** Id of the step whose conclusion is the (instantiated) goal. */
	goal: number;
	stats: ProofStats;
}

export interface ProveResponse {
	verdict: Verdict;
	reason: string | null;
	proof: Proof | null;
}

export interface AnswerEntry {
	bindings: Record<string, string>;
	proof: Proof;
}

export interface AnswerResponse {
	verdict: AnswerVerdict;
	reason: string | null;
	answers: AnswerEntry[];
}

export interface CheckResponse {
	valid: boolean;
	step: number | null;
	reason: string | null;
}
