/** The figure suite: each builder reads one simulator output file and
 * returns an SVG string. */

import { readFileSync } from 'fs';
import { basename } from 'path';

import { renderBarChart, renderLineChart, Series } from './charts';
import { renderClusterMap, validateClusterDoc } from './clusterMap';
import { num, parseCsv, requireColumns, Table } from './csv';

export const FIGURE_KINDS = [
  'cluster_map',
  'throughput_vs_cluster_size',
  'damping_impact',
  'fairness_bars',
  'delay_comparison',
  'gain_vs_radius',
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureInputs {
  cluster_map: string; // clusters.json
  throughput_vs_cluster_size: string; // sweep_cluster_size.csv
  damping_impact: string; // sweep_damping.csv
  fairness_bars: string; // sweep_cluster_size.csv
  delay_comparison: string; // sweep_cluster_size.csv
  gain_vs_radius: string; // sweep_cell_radius.csv
}

export const DEFAULT_INPUT_FILES: FigureInputs = {
  cluster_map: 'clusters.json',
  throughput_vs_cluster_size: 'sweep_cluster_size.csv',
  damping_impact: 'sweep_damping.csv',
  fairness_bars: 'sweep_cluster_size.csv',
  delay_comparison: 'sweep_cluster_size.csv',
  gain_vs_radius: 'sweep_cell_radius.csv',
};

const ALGO_LABELS: Record<string, string> = {
  ap_comp: 'adaptive clustering',
  common_comp: 'fixed-size CoMP',
  no_comp: 'no CoMP',
};

function loadTable(path: string): Table {
  return parseCsv(readFileSync(path, 'utf8'), basename(path));
}

function seriesByAlgorithm(table: Table, yColumn: string): Series[] {
  requireColumns(table, ['x', 'algorithm', yColumn]);
  const byAlgo = new Map<string, [number, number][]>();
  for (const row of table.rows) {
    const algo = row['algorithm'];
    if (!byAlgo.has(algo)) byAlgo.set(algo, []);
    byAlgo.get(algo)!.push([num(row, 'x', table), num(row, yColumn, table)]);
  }
  return [...byAlgo.entries()].map(([algo, points]) => ({
    name: ALGO_LABELS[algo] ?? algo,
    points: points.sort((a, b) => a[0] - b[0]),
  }));
}

export function figureClusterMap(path: string): string {
  const doc = validateClusterDoc(JSON.parse(readFileSync(path, 'utf8')), basename(path));
  return renderClusterMap(doc);
}

export function figureThroughputVsClusterSize(path: string): string {
  return renderLineChart({
    title: 'Edge-user throughput vs cluster size',
    xLabel: 'cluster size',
    yLabel: 'mean edge throughput [bps]',
    series: seriesByAlgorithm(loadTable(path), 'mean_throughput_bps'),
  });
}

export function figureDampingImpact(path: string): string {
  return renderLineChart({
    title: 'Damping factor impact on edge throughput',
    xLabel: 'damping factor',
    yLabel: 'mean edge throughput [bps]',
    series: seriesByAlgorithm(loadTable(path), 'mean_throughput_bps'),
  });
}

export function figureFairnessBars(path: string): string {
  const table = loadTable(path);
  requireColumns(table, ['algorithm', 'jain']);
  const sums = new Map<string, { total: number; count: number }>();
  for (const row of table.rows) {
    const algo = row['algorithm'];
    const entry = sums.get(algo) ?? { total: 0, count: 0 };
    entry.total += num(row, 'jain', table);
    entry.count += 1;
    sums.set(algo, entry);
  }
  const categories = [...sums.keys()];
  return renderBarChart({
    title: 'Fairness comparison (Jain index)',
    yLabel: 'mean Jain index',
    categories: categories.map((c) => ALGO_LABELS[c] ?? c),
    values: categories.map((c) => sums.get(c)!.total / sums.get(c)!.count),
  });
}

export function figureDelayComparison(path: string): string {
  return renderLineChart({
    title: 'Transmission delay vs cluster size',
    xLabel: 'cluster size',
    yLabel: 'delay [s]',
    series: seriesByAlgorithm(loadTable(path), 'mean_delay_s'),
  });
}

export function figureGainVsRadius(path: string): string {
  const table = loadTable(path);
  requireColumns(table, ['x', 'algorithm', 'mean_throughput_bps']);
  const byX = new Map<number, Record<string, number>>();
  for (const row of table.rows) {
    const x = num(row, 'x', table);
    if (!byX.has(x)) byX.set(x, {});
    byX.get(x)![row['algorithm']] = num(row, 'mean_throughput_bps', table);
  }
  const points: [number, number][] = [];
  for (const [x, arms] of [...byX.entries()].sort((a, b) => a[0] - b[0])) {
    if (!('ap_comp' in arms) || !('common_comp' in arms)) {
      throw new Error(`${table.name}: radius ${x} lacks ap_comp/common_comp rows`);
    }
    points.push([x, arms['ap_comp'] / arms['common_comp']]);
  }
  return renderLineChart({
    title: 'Adaptive-over-fixed throughput gain vs cell radius',
    xLabel: 'cell radius [m]',
    yLabel: 'throughput ratio',
    series: [{ name: 'adaptive / fixed-size', points }],
  });
}

export const FIGURE_BUILDERS: Record<FigureKind, (path: string) => string> = {
  cluster_map: figureClusterMap,
  throughput_vs_cluster_size: figureThroughputVsClusterSize,
  damping_impact: figureDampingImpact,
  fairness_bars: figureFairnessBars,
  delay_comparison: figureDelayComparison,
  gain_vs_radius: figureGainVsRadius,
};
