/**
 * Binding equivalence: outputs marshaled through the CLI must match the
 * Python library's outputs exactly, for seeded degrade and encode calls.
 */
import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, test } from "vitest";

import {
  BatchRequest,
  degrade,
  degradeBatch,
  InapplicableError,
} from "../src/degrade.js";
import { encodeCommandsBatch, encodePianoRollBatch } from "../src/encode.js";
import { BoundNote, csvToNotes, notesToCsv } from "../src/notes.js";
import { pythonInterpreter } from "../src/runner.js";

const testsDir = dirname(fileURLToPath(import.meta.url));

interface ExpectedDegrade {
  input: string;
  seed: number;
  label: string;
  notes: number[][]; // [onset, track, pitch, dur] rows in file order
  frame_labels: string;
}

interface Expected {
  degrade: ExpectedDegrade[];
  commands: { input: string; tokens: number[] }[];
  rolls: { input: string; frames: number; presence: number[][]; onsets: number[][] }[];
}

let fixtureDir: string;
let expected: Expected;
const excerptCache = new Map<string, BoundNote[]>();

function loadExcerpt(relative: string): BoundNote[] {
  let notes = excerptCache.get(relative);
  if (!notes) {
    notes = csvToNotes(readFileSync(join(fixtureDir, relative), "utf-8"));
    excerptCache.set(relative, notes);
  }
  return notes;
}

function toRows(notes: BoundNote[]): number[][] {
  return notes.map((n) => [n.onset, n.track, n.pitch, n.dur]);
}

beforeAll(() => {
  fixtureDir = mkdtempSync(join(tmpdir(), "mdtk-fixtures-"));
  execFileSync(pythonInterpreter(), [join(testsDir, "gen_expected.py"), fixtureDir], {
    stdio: "inherit",
  });
  expected = JSON.parse(readFileSync(join(fixtureDir, "expected.json"), "utf-8"));
}, 120_000);

afterAll(() => {
  rmSync(fixtureDir, { recursive: true, force: true });
});

describe("degrade equivalence", () => {
  test("1000 seeded batch calls match the library exactly", () => {
    const requests: BatchRequest[] = expected.degrade.map((entry) => ({
      notes: loadExcerpt(entry.input),
      seed: entry.seed,
      type: "random",
    }));
    const results = degradeBatch(requests);
    expect(results).toHaveLength(expected.degrade.length);
    results.forEach((result, index) => {
      const want = expected.degrade[index];
      expect(result, `call ${index}`).not.toBeNull();
      expect(result!.label, `call ${index}`).toBe(want.label);
      expect(toRows(result!.notes), `call ${index}`).toEqual(want.notes);
      expect(result!.frameLabels, `call ${index}`).toBe(want.frame_labels);
    });
  }, 300_000);

  test("single-call path agrees with the batch path", () => {
    for (const index of [0, 17, 503, 999]) {
      const want = expected.degrade[index];
      const result = degrade(loadExcerpt(want.input), { type: "random" }, want.seed);
      expect(result.label).toBe(want.label);
      expect(toRows(result.notes)).toEqual(want.notes);
      expect(result.frameLabels).toBe(want.frame_labels);
    }
  }, 120_000);

  test("cleanProportion 1 returns the input with label none", () => {
    const notes = loadExcerpt(expected.degrade[0].input);
    const result = degrade(notes, { cleanProportion: 1.0 }, 5);
    expect(result.label).toBe("none");
    expect(toRows(result.notes)).toEqual(toRows(notes));
    expect(result.frameLabels).not.toContain("1");
  }, 60_000);

  test("inapplicable degradation raises a typed error", () => {
    expect(() => degrade([], { type: "remove_note" }, 1)).toThrow(InapplicableError);
  }, 60_000);
});

describe("input validation", () => {
  test("invalid pitch names the note index", () => {
    const notes: BoundNote[] = [
      { pitch: 60, onset: 0, dur: 100, track: 0 },
      { pitch: 200, onset: 50, dur: 100, track: 0 },
    ];
    expect(() => notesToCsv(notes)).toThrow(/note 1: pitch/);
  });

  test("non-integer duration names the note index", () => {
    expect(() => notesToCsv([{ pitch: 60, onset: 0, dur: 1.5, track: 0 }])).toThrow(
      /note 0: dur/,
    );
  });
});

describe("encode equivalence", () => {
  test("500 command encodings match the library exactly", () => {
    const excerpts = expected.commands.map((entry) => loadExcerpt(entry.input));
    const encoded = encodeCommandsBatch(excerpts, 40);
    encoded.forEach((tokens, index) => {
      expect(tokens, `call ${index}`).toEqual(expected.commands[index].tokens);
    });
  }, 300_000);

  test("500 roll encodings match the library exactly", () => {
    const excerpts = expected.rolls.map((entry) => loadExcerpt(entry.input));
    const encoded = encodePianoRollBatch(excerpts, 40);
    encoded.forEach((pair, index) => {
      const want = expected.rolls[index];
      expect(pair.frames, `call ${index}`).toBe(want.frames);
      const presence = new Uint8Array(want.frames * 128);
      for (const [f, p] of want.presence) presence[f * 128 + p] = 1;
      const onsets = new Uint8Array(want.frames * 128);
      for (const [f, p] of want.onsets) onsets[f * 128 + p] = 1;
      expect(pair.presence, `call ${index} presence`).toEqual(presence);
      expect(pair.onsets, `call ${index} onsets`).toEqual(onsets);
    });
  }, 300_000);
});
