/**
 * Line schemas for the two JSONL boundaries shared with the Python pipeline:
 * the ranked-document export it writes (`mmrsum rank`) and the
 * candidate-summaries file it ingests (`mmrsum fuse` / `mmrsum run`).
 */

import { z } from "zod";

export const rankedRecordSchema = z.object({
  id: z.string().min(1),
  query: z.array(z.string()),
  input_text: z.string().min(1),
  token_count: z.number().int().nonnegative(),
});

export type RankedRecord = z.infer<typeof rankedRecordSchema>;

export const candidateRecordSchema = z.object({
  model: z.string().min(1),
  id: z.string().min(1),
  summary: z.string().min(1),
});

export type CandidateRecord = z.infer<typeof candidateRecordSchema>;

/** Parse one JSONL document into records, naming the failing line. */
export function parseJsonlWith<T>(
  text: string,
  schema: z.ZodType<T>,
  label: string,
): T[] {
  const records: T[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i += 1) {
    const line = lines[i].trim();
    if (line === "") continue;
    let raw: unknown;
    try {
      raw = JSON.parse(line);
    } catch (error) {
      throw new Error(`${label}: line ${i + 1}: invalid JSON (${String(error)})`);
    }
    const result = schema.safeParse(raw);
    if (!result.success) {
      throw new Error(
        `${label}: line ${i + 1}: ${result.error.issues
          .map((issue) => `${issue.path.join(".")}: ${issue.message}`)
          .join("; ")}`,
      );
    }
    records.push(result.data);
  }
  return records;
}

export function parseRankedFile(text: string, label = "ranked input"): RankedRecord[] {
  return parseJsonlWith(text, rankedRecordSchema, label);
}

export function parseCandidatesFile(
  text: string,
  label = "candidates",
): CandidateRecord[] {
  return parseJsonlWith(text, candidateRecordSchema, label);
}

export function serializeCandidates(records: CandidateRecord[]): string {
  return records.map((record) => JSON.stringify(record)).join("\n") + "\n";
}
