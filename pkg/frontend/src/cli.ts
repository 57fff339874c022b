#!/usr/bin/env node
import { existsSync, mkdirSync, readFileSync, readdirSync, statSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { readCsv } from "./csv.js";
import {
  COMPARISON_COLUMNS,
  CWND_COLUMNS,
  PACKET_COLUMNS,
  QUEUE_COLUMNS,
  SchemaError,
  comparisonRow,
  cwndRow,
  packetRow,
  queueRow,
} from "./schema.js";
import {
  cdfFigure,
  cwndFigure,
  delayBarsFigure,
  queueFigure,
  type CwndTrace,
  type Figure,
} from "./figures.js";

const CWND_FILES: ReadonlyArray<readonly [string, string]> = [
  ["cwnd_ftp.csv", "ftp"],
  ["cwnd_wow_up.csv", "wow up"],
  ["cwnd_wow_down.csv", "wow down"],
];

interface Output {
  files: string[];
  warnings: string[];
}

/** "<variant>, <n>-packet buffer" from the run's summary, else the dir name. */
function describeRun(dir: string): string {
  try {
    const summary = JSON.parse(readFileSync(join(dir, "summary.json"), "utf8"));
    const flows: Array<{ role?: string; tcp_variant?: string }> =
      summary?.config?.flows ?? [];
    const ftp = flows.find((f) => f.role === "ftp");
    const buffer = summary?.config?.uplink_buffer_pkts;
    if (ftp?.tcp_variant !== undefined && buffer !== undefined) {
      return `${ftp.tcp_variant}, ${buffer}-packet buffer`;
    }
  } catch {
    // fall through to the directory name
  }
  return basename(dir);
}

function writeFigure(outDir: string, name: string, figure: Figure, into: Output): void {
  const path = join(outDir, name);
  writeFileSync(path, figure.svg);
  into.files.push(path);
  into.warnings.push(...figure.warnings);
}

/** Render the figures for one run directory (standalone or sweep cell). */
function renderRun(dir: string, outDir: string, prefix: string, into: Output): void {
  const label = describeRun(dir);

  const traces: CwndTrace[] = [];
  for (const [file, flow] of CWND_FILES) {
    const path = join(dir, file);
    if (existsSync(path)) {
      traces.push({ label: flow, rows: readCsv(path, CWND_COLUMNS, cwndRow) });
    }
  }
  if (traces.length === 0) {
    throw new SchemaError(`${dir}: no cwnd CSV files found`);
  }
  writeFigure(outDir, `${prefix}cwnd.svg`, cwndFigure(traces, `TCP window (${label})`), into);

  const queueRows = readCsv(join(dir, "queue_uplink.csv"), QUEUE_COLUMNS, queueRow);
  writeFigure(
    outDir,
    `${prefix}queue_uplink.svg`,
    queueFigure(queueRows, `Uplink queue (${label})`),
    into,
  );

  const packetsPath = join(dir, "packets.csv");
  if (existsSync(packetsPath)) {
    const packetRows = readCsv(packetsPath, PACKET_COLUMNS, packetRow);
    writeFigure(
      outDir,
      `${prefix}size_iat.svg`,
      cdfFigure(packetRows, `Packet size and inter-packet time (${label})`),
      into,
    );
  } else {
    into.warnings.push(`${dir}: no packets.csv, skipping the size/iat figure`);
  }
}

function render(resultsDir: string, outDir: string): Output {
  if (!existsSync(resultsDir) || !statSync(resultsDir).isDirectory()) {
    throw new SchemaError(`${resultsDir}: not a results directory`);
  }
  const into: Output = { files: [], warnings: [] };
  mkdirSync(outDir, { recursive: true });

  const comparison = join(resultsDir, "comparison.csv");
  if (existsSync(comparison)) {
    const rows = readCsv(comparison, COMPARISON_COLUMNS, comparisonRow);
    writeFigure(outDir, "delay_bars.svg", delayBarsFigure(rows), into);
    const cells = readdirSync(resultsDir, { withFileTypes: true })
      .filter((e) => e.isDirectory() && existsSync(join(resultsDir, e.name, "summary.json")))
      .map((e) => e.name)
      .sort();
    if (cells.length === 0) {
      throw new SchemaError(`${resultsDir}: comparison.csv present but no cell directories`);
    }
    for (const cell of cells) {
      renderRun(join(resultsDir, cell), outDir, `${cell}_`, into);
    }
  } else {
    renderRun(resultsDir, outDir, "", into);
  }
  return into;
}

export async function main(argv: string[]): Promise<number> {
  let args: { results: string; out: string };
  try {
    args = await yargs(argv)
      .scriptName("makefigs")
      .usage("$0 --results <dir> --out <dir>")
      .option("results", {
        type: "string",
        demandOption: true,
        describe: "simulation output directory (single run or sweep)",
      })
      .option("out", {
        type: "string",
        demandOption: true,
        describe: "directory to write SVG figures into",
      })
      .strict()
      .exitProcess(false)
      .parse();
  } catch {
    return 2;
  }

  try {
    const result = render(args.results, args.out);
    for (const warning of result.warnings) {
      console.error(`warning: ${warning}`);
    }
    for (const file of result.files) {
      console.log(`wrote ${file}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`missing input: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(await main(process.argv.slice(2)));
}
