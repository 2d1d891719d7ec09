export {
  BoundNote,
  CSV_HEADER,
  csvToNotes,
  note,
  notesToCsv,
  sortNotes,
  validateNotes,
} from "./notes.js";
export { CliError, pythonInterpreter, runCli } from "./runner.js";
export {
  BatchRequest,
  DegradeConfig,
  DegradeResult,
  InapplicableError,
  degrade,
  degradeBatch,
} from "./degrade.js";
export {
  N_PITCHES,
  PianoRollPair,
  encodeCommands,
  encodeCommandsBatch,
  encodePianoRoll,
  encodePianoRollBatch,
  parseRollFile,
} from "./encode.js";
export { DatasetItem, Split, SPLITS, loadDataset } from "./dataset.js";
