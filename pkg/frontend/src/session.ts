/**
 * Session-style client for the modalprover CLI.
 *
 * The client is a pure transport: it assembles problem text, spawns the
 * CLI with --format json, and parses stdout. No reasoning happens here,
 * so results are exactly what the CLI would print for the same input.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { AnswerResponse, CheckResponse, ProveResponse } from "./types";

export interface LimitOptions {
	maxIterations?: number;
	maxClauses?: number;
	timeoutMs?: number;
	maxDepth?: number;
	maxAnswers?: number;
}

export interface SessionOptions {
	/** Executable plus leading args; default: ["modalprover"]. */
	command?: string[];
	limits?: LimitOptions;
}

/** A problem assembled from formula strings in the CLI's s-expression
 * syntax. Declarations are passed through verbatim. */
export interface ProblemSpec {
	agents?: string[];
	times?: string[];
	/** Signature entries like "(pred Raining 0)" or "(func c 0)". */
	signature?: string[];
	assumptions: string[];
	goal: string;
	/** Query variables, e.g. ["?x"]; switches prove() to answer mode. */
	answerVars?: string[];
}

export class ReasonerError extends Error {}

export class SessionClosedError extends ReasonerError {
	constructor() {
		super("session is closed");
	}
}

/** Raised when the CLI reports an input error (exit code 3); the message
 * carries the CLI diagnostic, including line/column for syntax errors. */
export class InputError extends ReasonerError {}

export class ReasonerSession {
	private readonly command: string[];
	private readonly limits: LimitOptions;
	private closed = false;

	constructor(options: SessionOptions = {}) {
		this.command = options.command ?? ["modalprover"];
		this.limits = options.limits ?? {};
	}

	close(): void {
		this.closed = true;
	}

	proveFile(path: string, limits?: LimitOptions): ProveResponse {
		return this.run("prove", [path], limits) as ProveResponse;
	}

	answerFile(path: string, limits?: LimitOptions): AnswerResponse {
		return this.run("answer", [path], limits) as AnswerResponse;
	}

	checkFile(proofPath: string, problemPath: string): CheckResponse {
		return this.run("check", [proofPath, problemPath]) as CheckResponse;
	}

	prove(spec: ProblemSpec, limits?: LimitOptions): ProveResponse {
		return this.withProblemFile(spec, (path) =>
			this.proveFile(path, limits),
		);
	}

	answer(spec: ProblemSpec, limits?: LimitOptions): AnswerResponse {
		return this.withProblemFile(spec, (path) =>
			this.answerFile(path, limits),
		);
	}

	private withProblemFile<T>(spec: ProblemSpec, fn: (path: string) => T): T {
		const dir = mkdtempSync(join(tmpdir(), "modalprover-"));
		try {
			const path = join(dir, "problem.sxp");
			writeFileSync(path, assembleProblem(spec), "utf8");
			return fn(path);
		} finally {
			rmSync(dir, { recursive: true, force: true });
		}
	}

	private run(
		sub: string,
		args: string[],
		limits?: LimitOptions,
	): unknown {
		if (this.closed) {
			throw new SessionClosedError();
		}
		const [exe, ...lead] = this.command;
		const argv = [
			...lead,
			sub,
			...args,
			"--format",
			"json",
			...limitFlags({ ...this.limits, ...limits }),
		];
		const proc = spawnSync(exe, argv, { encoding: "utf8" });
		if (proc.error) {
			throw new ReasonerError(
				`failed to spawn ${exe}: ${proc.error.message}`,
			);
		}
		if (proc.status === 3 || proc.status === null) {
			throw new InputError(proc.stderr.trim() || "input error");
		}
		// 0/1/2 all carry a JSON report on stdout
		return JSON.parse(proc.stdout);
	}
}

function limitFlags(limits: LimitOptions): string[] {
	const flags: string[] = [];
	if (limits.maxIterations !== undefined) {
		flags.push("--max-iterations", String(limits.maxIterations));
	}
	if (limits.maxClauses !== undefined) {
		flags.push("--max-clauses", String(limits.maxClauses));
	}
	if (limits.timeoutMs !== undefined) {
		flags.push("--timeout-ms", String(limits.timeoutMs));
	}
	if (limits.maxDepth !== undefined) {
		flags.push("--max-depth", String(limits.maxDepth));
	}
	if (limits.maxAnswers !== undefined) {
		flags.push("--max-answers", String(limits.maxAnswers));
	}
	return flags;
}

export function assembleProblem(spec: ProblemSpec): string {
	const lines: string[] = ["(problem"];
	if (spec.agents && spec.agents.length > 0) {
		lines.push(`  (agents ${spec.agents.join(" ")})`);
	}
	if (spec.times && spec.times.length > 0) {
		lines.push(`  (times ${spec.times.join(" ")})`);
	}
	if (spec.signature && spec.signature.length > 0) {
		lines.push(`  (signature ${spec.signature.join(" ")})`);
	}
	spec.assumptions.forEach((f, i) => {
		lines.push(`  (assume u${i + 1} ${f})`);
	});
	lines.push(`  (goal ${spec.goal})`);
	if (spec.answerVars && spec.answerVars.length > 0) {
		lines.push(`  (answer ${spec.answerVars.join(" ")})`);
	}
	lines.push(")");
	return lines.join("\n") + "\n";
}
