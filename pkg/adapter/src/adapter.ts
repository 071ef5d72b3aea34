/**
 * Candidate generation: every resolvable model summarizes every ranked
 * record, and the results land in the exact JSONL shape the Python pipeline
 * ingests. Failures never abort the run; they are logged and the output is
 * flagged as partial.
 */

import { readFile, writeFile } from "node:fs/promises";

import {
  CandidateRecord,
  RankedRecord,
  parseRankedFile,
  serializeCandidates,
} from "./schema.js";
import {
  HostedModelOptions,
  SummarizerModel,
  resolveModel,
} from "./models.js";

export interface AdapterConfig {
  /** Model identifiers; `stub:*` names run locally. */
  models: string[];
  /** Inputs are truncated to this many whitespace tokens before inference. */
  maxInputTokens: number;
  /** Summaries shorter than this trigger one enforced-minimum retry. */
  minOutputTokens: number;
  /** Records per progress batch; inference itself stays sequential. */
  batchSize: number;
  /** Free-form hint recorded in the log (e.g. "cpu", "cuda:0"). */
  deviceHint?: string;
}

export const DEFAULT_CONFIG: AdapterConfig = {
  models: [],
  maxInputTokens: 512,
  minOutputTokens: 15,
  batchSize: 8,
  deviceHint: "cpu",
};

export interface AdapterLogEvent {
  event: "regenerated" | "model_failed" | "record_failed";
  model: string;
  id?: string;
  detail?: string;
}

export interface AdapterLog {
  models: string[];
  config: { maxInputTokens: number; minOutputTokens: number; batchSize: number; deviceHint?: string };
  written: number;
  expected: number;
  partial: boolean;
  failures: { model: string; error: string }[];
  events: AdapterLogEvent[];
}

export interface GenerateResult {
  records: CandidateRecord[];
  log: AdapterLog;
}

export function countTokens(text: string): number {
  return text.split(/\s+/).filter(Boolean).length;
}

export function truncateTokens(text: string, budget: number): string {
  const tokens = text.split(/\s+/).filter(Boolean);
  return tokens.slice(0, budget).join(" ");
}

function validateConfig(config: AdapterConfig): void {
  if (config.models.length === 0) {
    throw new Error("adapter config needs at least one model");
  }
  if (config.maxInputTokens < 1 || config.minOutputTokens < 1 || config.batchSize < 1) {
    throw new Error("token budgets and batch size must be positive");
  }
}

async function summarizeRecord(
  model: SummarizerModel,
  record: RankedRecord,
  config: AdapterConfig,
  events: AdapterLogEvent[],
): Promise<string> {
  const input = truncateTokens(record.input_text, config.maxInputTokens);
  let summary = await model.summarize(input, { minTokens: config.minOutputTokens });
  if (countTokens(summary) < config.minOutputTokens) {
    // one retry with the minimum length strictly enforced at decode time
    summary = await model.summarize(input, {
      minTokens: config.minOutputTokens,
      enforceMinTokens: true,
    });
    events.push({ event: "regenerated", model: model.name, id: record.id });
  }
  return summary;
}

/** Run every model over every record; models that fail to load are skipped. */
export async function generateCandidates(
  records: RankedRecord[],
  config: AdapterConfig,
  hosted: HostedModelOptions = {},
): Promise<GenerateResult> {
  validateConfig(config);
  const out: CandidateRecord[] = [];
  const failures: { model: string; error: string }[] = [];
  const events: AdapterLogEvent[] = [];

  for (const name of config.models) {
    const model = resolveModel(name, hosted);
    try {
      await model.load();
    } catch (error) {
      failures.push({ model: name, error: String(error) });
      events.push({ event: "model_failed", model: name, detail: String(error) });
      continue;
    }
    for (let start = 0; start < records.length; start += config.batchSize) {
      const batch = records.slice(start, start + config.batchSize);
      for (const record of batch) {
        try {
          const summary = await summarizeRecord(model, record, config, events);
          out.push({ model: name, id: record.id, summary });
        } catch (error) {
          failures.push({ model: name, error: `record ${record.id}: ${String(error)}` });
          events.push({
            event: "record_failed",
            model: name,
            id: record.id,
            detail: String(error),
          });
        }
      }
    }
  }

  const expected = config.models.length * records.length;
  const log: AdapterLog = {
    models: [...config.models],
    config: {
      maxInputTokens: config.maxInputTokens,
      minOutputTokens: config.minOutputTokens,
      batchSize: config.batchSize,
      deviceHint: config.deviceHint,
    },
    written: out.length,
    expected,
    partial: out.length < expected,
    failures,
    events,
  };
  return { records: out, log };
}

export async function generateCandidatesFile(
  inputPath: string,
  outputPath: string,
  logPath: string,
  config: AdapterConfig,
  hosted: HostedModelOptions = {},
): Promise<AdapterLog> {
  const text = await readFile(inputPath, "utf-8");
  const records = parseRankedFile(text, inputPath);
  const result = await generateCandidates(records, config, hosted);
  await writeFile(outputPath, serializeCandidates(result.records), "utf-8");
  await writeFile(logPath, JSON.stringify(result.log, null, 2) + "\n", "utf-8");
  return result.log;
}
