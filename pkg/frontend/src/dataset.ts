/** Reading a built dataset tree (metadata.csv plus per-item CSV pairs). */
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { BoundNote, csvToNotes } from "./notes.js";

export const SPLITS = ["train", "valid", "test"] as const;
export type Split = (typeof SPLITS)[number];

export interface DatasetItem {
  itemId: string;
  split: Split;
  /** A degradation name, or "none" for an undegraded item. */
  label: string;
  /** Per-frame 0/1 flags marking where the degradation landed. */
  frameLabels: Uint8Array;
  clean: BoundNote[];
  degraded: BoundNote[];
}

const METADATA_HEADER = "item_id,split,label,frame_labels";

/** Load dataset items, optionally restricted to one split. */
export function loadDataset(root: string, split?: Split): DatasetItem[] {
  const metadata = readFileSync(join(root, "metadata.csv"), "utf-8");
  const lines = metadata.split("\n");
  if (lines[0] !== METADATA_HEADER) {
    throw new Error(`bad metadata header: '${lines[0]}'`);
  }
  const items: DatasetItem[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (!line) continue;
    const fields = line.split(",");
    if (fields.length !== 4) {
      throw new Error(`metadata line ${i + 1}: expected 4 columns`);
    }
    const [itemId, itemSplit, label, labelString] = fields;
    if (!SPLITS.includes(itemSplit as Split)) {
      throw new Error(`metadata line ${i + 1}: unknown split '${itemSplit}'`);
    }
    if (split !== undefined && itemSplit !== split) continue;
    const itemDir = join(root, itemSplit, itemId);
    items.push({
      itemId,
      split: itemSplit as Split,
      label,
      frameLabels: Uint8Array.from(labelString, (c) => {
        if (c !== "0" && c !== "1") {
          throw new Error(`metadata line ${i + 1}: bad frame label '${c}'`);
        }
        return c === "1" ? 1 : 0;
      }),
      clean: csvToNotes(readFileSync(join(itemDir, "clean.csv"), "utf-8")),
      degraded: csvToNotes(readFileSync(join(itemDir, "degraded.csv"), "utf-8")),
    });
  }
  return items;
}
