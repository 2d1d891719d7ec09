/**
 * Note tuples and the CSV wire format shared with the Python toolkit.
 *
 * A note is four integers: MIDI pitch (C4 = 60), onset and duration in
 * milliseconds, and a track index. The CSV layout is fixed:
 * `onset,track,pitch,dur` with a mandatory header.
 */

export interface BoundNote {
  pitch: number;
  onset: number;
  dur: number;
  track: number;
}

export const CSV_HEADER = "onset,track,pitch,dur";

export function note(pitch: number, onset: number, dur: number, track = 0): BoundNote {
  return { pitch, onset, dur, track };
}

/** Validate a note list; errors name the offending note index. */
export function validateNotes(notes: BoundNote[]): void {
  notes.forEach((n, index) => {
    for (const [field, value] of Object.entries(n) as [string, number][]) {
      if (!Number.isInteger(value)) {
        throw new Error(`note ${index}: ${field} must be an integer, got ${value}`);
      }
    }
    if (n.pitch < 0 || n.pitch > 127) {
      throw new Error(`note ${index}: pitch must be in [0, 127], got ${n.pitch}`);
    }
    if (n.onset < 0) {
      throw new Error(`note ${index}: onset must be >= 0, got ${n.onset}`);
    }
    if (n.dur < 1) {
      throw new Error(`note ${index}: dur must be >= 1, got ${n.dur}`);
    }
    if (n.track < 0) {
      throw new Error(`note ${index}: track must be >= 0, got ${n.track}`);
    }
  });
}

/** Canonical ordering: (onset, pitch, dur, track), matching the toolkit. */
export function sortNotes(notes: BoundNote[]): BoundNote[] {
  return [...notes].sort(
    (a, b) =>
      a.onset - b.onset || a.pitch - b.pitch || a.dur - b.dur || a.track - b.track,
  );
}

export function notesToCsv(notes: BoundNote[]): string {
  validateNotes(notes);
  const rows = sortNotes(notes).map((n) => `${n.onset},${n.track},${n.pitch},${n.dur}`);
  return [CSV_HEADER, ...rows, ""].join("\n");
}

export function csvToNotes(text: string): BoundNote[] {
  const lines = text.split("\n");
  if (lines[0] !== CSV_HEADER) {
    throw new Error(`expected header '${CSV_HEADER}', got '${lines[0]}'`);
  }
  const notes: BoundNote[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (!line) continue;
    const fields = line.split(",");
    if (fields.length !== 4) {
      throw new Error(`line ${i + 1}: expected 4 columns, got ${fields.length}`);
    }
    const [onset, track, pitch, dur] = fields.map((f) => {
      const value = Number(f);
      if (!Number.isInteger(value)) {
        throw new Error(`line ${i + 1}: non-integer field '${f}'`);
      }
      return value;
    });
    notes.push({ pitch, onset, dur, track });
  }
  return notes;
}
