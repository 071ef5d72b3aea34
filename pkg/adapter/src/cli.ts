#!/usr/bin/env node
/**
 * CLI: read a ranked-document export, run the configured models, write the
 * candidate-summaries JSONL plus an adapter log.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { DEFAULT_CONFIG, generateCandidatesFile } from "./adapter.js";
import { DEFAULT_MODELS } from "./models.js";

export async function run(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .scriptName("mmrsum-adapter")
    .option("input", {
      type: "string",
      demandOption: true,
      describe: "ranked-document JSONL export from the pipeline",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "candidate-summaries JSONL to write",
    })
    .option("log", {
      type: "string",
      describe: "adapter log path (default: <out>.log.json)",
    })
    .option("models", {
      type: "string",
      array: true,
      default: DEFAULT_MODELS,
      describe: "model identifiers; stub:* names run locally",
    })
    .option("max-input-tokens", {
      type: "number",
      default: DEFAULT_CONFIG.maxInputTokens,
      describe: "truncate inputs to this many whitespace tokens",
    })
    .option("min-new-tokens", {
      type: "number",
      default: DEFAULT_CONFIG.minOutputTokens,
      describe: "minimum summary length; shorter outputs trigger one retry",
    })
    .option("batch-size", {
      type: "number",
      default: DEFAULT_CONFIG.batchSize,
    })
    .option("device", {
      type: "string",
      default: DEFAULT_CONFIG.deviceHint,
      describe: "device hint recorded in the log",
    })
    .option("api-token", {
      type: "string",
      describe: "bearer token for hosted models (default: $HF_API_TOKEN)",
    })
    .option("base-url", {
      type: "string",
      describe: "hosted inference base URL",
    })
    .strict()
    .help()
    .parse();

  const logPath = args.log ?? `${args.out}.log.json`;
  try {
    const log = await generateCandidatesFile(
      args.input,
      args.out,
      logPath,
      {
        models: args.models,
        maxInputTokens: args["max-input-tokens"],
        minOutputTokens: args["min-new-tokens"],
        batchSize: args["batch-size"],
        deviceHint: args.device,
      },
      {
        apiToken: args["api-token"] ?? process.env.HF_API_TOKEN,
        baseUrl: args["base-url"],
      },
    );
    const flag = log.partial ? " (PARTIAL: some models or records failed)" : "";
    console.log(`wrote ${log.written}/${log.expected} candidate records${flag}`);
    return log.partial ? 2 : 0;
  } catch (error) {
    console.error(`error: ${String(error)}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");

if (invokedDirectly) {
  run(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
