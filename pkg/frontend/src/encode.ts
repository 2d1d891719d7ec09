/**
 * Model-input encodings via the toolkit CLI: command-token sequences and
 * the packed-bit piano-roll pair (presence + onsets, 128 pitches each).
 */
import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { BoundNote, notesToCsv } from "./notes.js";
import { runCli, withScratchDir } from "./runner.js";

export const N_PITCHES = 128;
export const ROLL_MAGIC = "MDTKROLL";

export interface PianoRollPair {
  /** Frame count. */
  frames: number;
  /** presence[f * 128 + p] === 1 when pitch p sounds during frame f. */
  presence: Uint8Array;
  /** onsets[f * 128 + p] === 1 when a note of pitch p begins at frame f. */
  onsets: Uint8Array;
}

/** Parse the 16-byte-header packed-bit roll file written by the toolkit. */
export function parseRollFile(data: Buffer): PianoRollPair {
  if (data.subarray(0, 8).toString("latin1") !== ROLL_MAGIC) {
    throw new Error("bad magic; not a roll file");
  }
  const frames = data.readUInt32LE(8);
  const width = data.readUInt32LE(12);
  if (width !== 2 * N_PITCHES) {
    throw new Error(`unsupported roll width ${width}`);
  }
  const rowBytes = width / 8;
  if (data.length !== 16 + frames * rowBytes) {
    throw new Error(
      `expected ${16 + frames * rowBytes} bytes, got ${data.length}`,
    );
  }
  const presence = new Uint8Array(frames * N_PITCHES);
  const onsets = new Uint8Array(frames * N_PITCHES);
  for (let f = 0; f < frames; f++) {
    for (let column = 0; column < width; column++) {
      const byte = data[16 + f * rowBytes + (column >> 3)];
      const bit = (byte >> (column & 7)) & 1; // little-endian within byte
      if (!bit) continue;
      if (column < N_PITCHES) {
        presence[f * N_PITCHES + column] = 1;
      } else {
        onsets[f * N_PITCHES + column - N_PITCHES] = 1;
      }
    }
  }
  return { frames, presence, onsets };
}

function parseCommandsCsv(text: string): number[] {
  const lines = text.split("\n");
  if (lines[0] !== "command_id") {
    throw new Error(`expected header command_id, got '${lines[0]}'`);
  }
  return lines.slice(1).filter((line) => line).map((line) => Number(line));
}

/** Encode one excerpt as command-token ids. */
export function encodeCommands(notes: BoundNote[], frameMs = 40): number[] {
  return encodeCommandsBatch([notes], frameMs)[0];
}

/** Encode one excerpt as a presence/onset piano-roll pair. */
export function encodePianoRoll(notes: BoundNote[], frameMs = 40): PianoRollPair {
  return encodePianoRollBatch([notes], frameMs)[0];
}

function encodeBatch(
  excerpts: BoundNote[][],
  format: "commands" | "roll",
  frameMs: number,
): string[] {
  return withScratchDir((dir) => {
    const lines = excerpts.map((notes, index) => {
      const inputPath = join(dir, `in_${index}.csv`);
      writeFileSync(inputPath, notesToCsv(notes));
      return JSON.stringify({ id: String(index), input: inputPath });
    });
    const requestsPath = join(dir, "requests.jsonl");
    writeFileSync(requestsPath, lines.join("\n") + "\n");
    const outDir = join(dir, "enc");
    runCli([
      "encode",
      "--batch", requestsPath,
      "--out-dir", outDir,
      "--format", format,
      "--frame-ms", String(frameMs),
    ]);
    const suffix = format === "commands" ? ".csv" : ".roll";
    return excerpts.map((_, index) =>
      readFileSync(join(outDir, `${index}${suffix}`), "latin1"),
    );
  });
}

export function encodeCommandsBatch(
  excerpts: BoundNote[][],
  frameMs = 40,
): number[][] {
  return encodeBatch(excerpts, "commands", frameMs).map(parseCommandsCsv);
}

export function encodePianoRollBatch(
  excerpts: BoundNote[][],
  frameMs = 40,
): PianoRollPair[] {
  return encodeBatch(excerpts, "roll", frameMs).map((raw) =>
    parseRollFile(Buffer.from(raw, "latin1")),
  );
}
