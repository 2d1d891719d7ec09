/**
 * Degradation calls marshaled through the toolkit CLI.
 *
 * Results are byte-for-byte those of the Python library for equal seeds
 * and inputs; only data marshaling happens on this side.
 */
import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { BoundNote, csvToNotes, notesToCsv } from "./notes.js";
import { CliError, runCli, withScratchDir } from "./runner.js";

export interface DegradeConfig {
  /** A degradation name, or "random" for the configured mixture. */
  type?: string;
  /** Fraction of mixture calls left clean (CLI default: 1/9). */
  cleanProportion?: number;
  /** Frame length for the returned frame labels (default 40 ms). */
  frameMs?: number;
  /** Extra CLI flags, e.g. ["--pitch-shift-align-pitch"]. */
  flags?: string[];
}

export interface DegradeResult {
  notes: BoundNote[];
  label: string;
  /** One 0/1 character per frame marking where the edit landed. */
  frameLabels: string;
}

export class InapplicableError extends Error {
  constructor(type: string) {
    super(`degradation ${type} is inapplicable to this excerpt`);
    this.name = "InapplicableError";
  }
}

function configFlags(config: DegradeConfig): string[] {
  const flags = [...(config.flags ?? [])];
  if (config.cleanProportion !== undefined) {
    flags.push("--clean-proportion", String(config.cleanProportion));
  }
  if (config.frameMs !== undefined) {
    flags.push("--frame-ms", String(config.frameMs));
  }
  return flags;
}

/** Degrade one excerpt with a fixed seed. */
export function degrade(
  notes: BoundNote[],
  config: DegradeConfig,
  seed: number,
): DegradeResult {
  return withScratchDir((dir) => {
    const inputPath = join(dir, "input.csv");
    const outPath = join(dir, "out.csv");
    const labelsPath = join(dir, "out.labels.json");
    writeFileSync(inputPath, notesToCsv(notes));
    try {
      runCli([
        "degrade",
        "--input", inputPath,
        "--type", config.type ?? "random",
        "--seed", String(seed),
        "--out", outPath,
        "--labels-out", labelsPath,
        ...configFlags(config),
      ]);
    } catch (error) {
      if (error instanceof CliError && error.stderr.includes("inapplicable")) {
        throw new InapplicableError(config.type ?? "random");
      }
      throw error;
    }
    const sidecar = JSON.parse(readFileSync(labelsPath, "utf-8")) as {
      label: string;
      frame_labels: string;
    };
    return {
      notes: csvToNotes(readFileSync(outPath, "utf-8")),
      label: sidecar.label,
      frameLabels: sidecar.frame_labels,
    };
  });
}

export interface BatchRequest {
  notes: BoundNote[];
  seed: number;
  type?: string;
}

/**
 * Degrade many excerpts in one CLI invocation (JSONL batch mode).
 *
 * Entries whose degradation is inapplicable come back as null.
 */
export function degradeBatch(
  requests: BatchRequest[],
  config: DegradeConfig = {},
): (DegradeResult | null)[] {
  return withScratchDir((dir) => {
    const lines = requests.map((request, index) => {
      const inputPath = join(dir, `in_${index}.csv`);
      writeFileSync(inputPath, notesToCsv(request.notes));
      return JSON.stringify({
        id: String(index),
        input: inputPath,
        type: request.type ?? config.type ?? "random",
        seed: request.seed,
      });
    });
    const requestsPath = join(dir, "requests.jsonl");
    writeFileSync(requestsPath, lines.join("\n") + "\n");
    const outDir = join(dir, "out");
    runCli([
      "degrade",
      "--batch", requestsPath,
      "--out-dir", outDir,
      ...configFlags(config),
    ]);
    const resultsByIndex = new Map<number, DegradeResult | null>();
    const resultLines = readFileSync(join(outDir, "results.jsonl"), "utf-8")
      .split("\n")
      .filter((line) => line);
    for (const line of resultLines) {
      const row = JSON.parse(line) as {
        id: string;
        status: string;
        output?: string;
        label?: string;
        frame_labels?: string;
      };
      if (row.status !== "ok") {
        resultsByIndex.set(Number(row.id), null);
        continue;
      }
      resultsByIndex.set(Number(row.id), {
        notes: csvToNotes(readFileSync(row.output!, "utf-8")),
        label: row.label!,
        frameLabels: row.frame_labels!,
      });
    }
    return requests.map((_, index) => resultsByIndex.get(index) ?? null);
  });
}
