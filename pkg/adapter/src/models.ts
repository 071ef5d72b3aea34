/**
 * Summarizer model resolution.
 *
 * Model identifiers are plain strings. `stub:*` names resolve to
 * deterministic local stand-ins (used in tests and for dry runs); anything
 * else is treated as a hosted-hub model id and served over HTTP. The usual
 * hub ids for the classic no-fine-tuning lineup (LED, T5, Pegasus,
 * abstractive/extractive BART, XLNet, GPT-2) are the documented defaults,
 * but nothing downstream depends on which models actually ran.
 */

export interface SummarizeOptions {
  /** Desired minimum output length in whitespace tokens. */
  minTokens: number;
  /** Retry mode: the model must honor the minimum strictly. */
  enforceMinTokens?: boolean;
}

export interface SummarizerModel {
  readonly name: string;
  /** May reject; the adapter then skips the model and logs the failure. */
  load(): Promise<void>;
  summarize(text: string, options: SummarizeOptions): Promise<string>;
}

/** Documented default model list for a real hosted run. */
export const DEFAULT_MODELS = [
  "allenai/led-base-16384",
  "t5-base",
  "google/pegasus-xsum",
  "facebook/bart-large-cnn",
  "xlnet-base-cased",
  "facebook/bart-large",
  "gpt2",
];

const sentenceEnd = /(?<=[.!?])\s+/;

function splitUnits(text: string): string[] {
  // ranked exports are plain token streams with no punctuation; fall back
  // to whole-text so the token-window logic below does the clipping
  const sentences = text.split(sentenceEnd);
  return sentences.length > 1 ? sentences : [text];
}

function clipTokens(units: string[], target: number, fromEnd: boolean): string {
  const kept: string[] = [];
  let count = 0;
  for (const unit of fromEnd ? [...units].reverse() : units) {
    if (count >= target) break;
    const tokens = unit.split(/\s+/).filter(Boolean);
    const room = target - count;
    const slice = tokens.length > room && units.length === 1
      ? (fromEnd ? tokens.slice(-room) : tokens.slice(0, room))
      : tokens;
    if (fromEnd) kept.unshift(slice.join(" "));
    else kept.push(slice.join(" "));
    count += slice.length;
  }
  return kept.join(" ").trim();
}

/** First sentences (or leading tokens) up to roughly a third of the input. */
class LeadStub implements SummarizerModel {
  constructor(readonly name: string) {}

  async load(): Promise<void> {}

  async summarize(text: string, options: SummarizeOptions): Promise<string> {
    const tokens = text.split(/\s+/).filter(Boolean);
    const target = Math.max(options.minTokens, Math.ceil(tokens.length / 3));
    return clipTokens(splitUnits(text), target, false);
  }
}

/** Last sentences (or trailing tokens), complementing the lead stub. */
class TailStub implements SummarizerModel {
  constructor(readonly name: string) {}

  async load(): Promise<void> {}

  async summarize(text: string, options: SummarizeOptions): Promise<string> {
    const tokens = text.split(/\s+/).filter(Boolean);
    const target = Math.max(options.minTokens, Math.ceil(tokens.length / 3));
    return clipTokens(splitUnits(text), target, true);
  }
}

/**
 * Emits a two-token summary unless the enforce flag is set: exercises the
 * adapter's minimum-length retry path.
 */
class ShortStub implements SummarizerModel {
  constructor(readonly name: string) {}

  async load(): Promise<void> {}

  async summarize(text: string, options: SummarizeOptions): Promise<string> {
    const tokens = text.split(/\s+/).filter(Boolean);
    if (!options.enforceMinTokens) {
      return tokens.slice(0, 2).join(" ");
    }
    return tokens.slice(0, Math.max(options.minTokens, 2)).join(" ");
  }
}

/** Always fails to load: exercises the skip-and-log path. */
class BrokenStub implements SummarizerModel {
  constructor(readonly name: string) {}

  async load(): Promise<void> {
    throw new Error(`model ${this.name} is not available`);
  }

  async summarize(): Promise<string> {
    throw new Error("unreachable: load() always fails");
  }
}

export type FetchLike = (
  url: string,
  init: { method: string; headers: Record<string, string>; body: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export interface HostedModelOptions {
  baseUrl?: string;
  apiToken?: string;
  fetchImpl?: FetchLike;
}

/**
 * Client for a hosted inference endpoint with the common
 * `{inputs, parameters}` summarization contract.
 */
export class HostedModel implements SummarizerModel {
  private readonly baseUrl: string;
  private readonly apiToken?: string;
  private readonly fetchImpl: FetchLike;

  constructor(readonly name: string, options: HostedModelOptions = {}) {
    this.baseUrl = options.baseUrl ?? "https://api-inference.huggingface.co/models";
    this.apiToken = options.apiToken;
    this.fetchImpl = options.fetchImpl ?? (fetch as unknown as FetchLike);
  }

  async load(): Promise<void> {
    // Hosted models are resolved lazily; a bad id surfaces on first call.
  }

  async summarize(text: string, options: SummarizeOptions): Promise<string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.apiToken) headers.Authorization = `Bearer ${this.apiToken}`;
    const response = await this.fetchImpl(`${this.baseUrl}/${this.name}`, {
      method: "POST",
      headers,
      body: JSON.stringify({
        inputs: text,
        parameters: {
          min_length: options.minTokens,
          ...(options.enforceMinTokens ? { min_new_tokens: options.minTokens } : {}),
        },
      }),
    });
    if (!response.ok) {
      throw new Error(`model ${this.name}: endpoint returned ${response.status}`);
    }
    const payload = (await response.json()) as Array<{
      summary_text?: string;
      generated_text?: string;
    }>;
    const first = Array.isArray(payload) ? payload[0] : undefined;
    const summary = first?.summary_text ?? first?.generated_text;
    if (typeof summary !== "string" || summary.trim() === "") {
      throw new Error(`model ${this.name}: endpoint returned no text`);
    }
    return summary;
  }
}

export function resolveModel(
  name: string,
  hosted: HostedModelOptions = {},
): SummarizerModel {
  switch (name) {
    case "stub:lead":
      return new LeadStub(name);
    case "stub:tail":
      return new TailStub(name);
    case "stub:short":
      return new ShortStub(name);
    case "stub:broken":
      return new BrokenStub(name);
    default:
      return new HostedModel(name, hosted);
  }
}
