/** Locating and spawning the Python toolkit CLI. */
import { execFileSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Interpreter used to run the toolkit; override with MDTK_PYTHON. */
export function pythonInterpreter(): string {
  return process.env.MDTK_PYTHON ?? "python3";
}

export class CliError extends Error {
  constructor(
    message: string,
    public readonly exitCode: number,
    public readonly stderr: string,
  ) {
    super(message);
    this.name = "CliError";
  }
}

export interface RunResult {
  stdout: string;
  stderr: string;
}

/** Run `python -m mdtk <args>`; throws CliError on a nonzero exit. */
export function runCli(args: string[]): RunResult {
  try {
    const stdout = execFileSync(pythonInterpreter(), ["-m", "mdtk", ...args], {
      encoding: "utf-8",
      stdio: ["ignore", "pipe", "pipe"],
    });
    return { stdout, stderr: "" };
  } catch (error) {
    const failure = error as { status?: number; stderr?: Buffer | string; message: string };
    const stderr =
      typeof failure.stderr === "string"
        ? failure.stderr
        : (failure.stderr?.toString() ?? "");
    throw new CliError(
      `mdtk ${args[0]} failed (exit ${failure.status ?? "?"}): ${stderr.trim()}`,
      failure.status ?? -1,
      stderr,
    );
  }
}

/** Run a function with a throwaway scratch directory. */
export function withScratchDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "mdtk-node-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
