/** Server-side echarts rendering to SVG strings (no DOM, no canvas). */

import * as echarts from 'echarts';

export interface Series {
  name: string;
  points: [number, number][];
}

function renderOption(option: echarts.EChartsOption): string {
  const chart = echarts.init(null, null, {
    renderer: 'svg',
    ssr: true,
    width: 820,
    height: 560,
  });
  chart.setOption(option);
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}

export function renderLineChart(opts: {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}): string {
  return renderOption({
    animation: false,
    title: { text: opts.title, left: 'center' },
    legend: { bottom: 0 },
    grid: { left: 90, right: 30, top: 60, bottom: 70 },
    xAxis: { type: 'value', name: opts.xLabel, nameLocation: 'middle', nameGap: 28 },
    yAxis: { type: 'value', name: opts.yLabel, nameLocation: 'middle', nameGap: 70 },
    series: opts.series.map((s) => ({
      type: 'line',
      name: s.name,
      data: s.points,
      symbolSize: 7,
    })),
  });
}

export function renderBarChart(opts: {
  title: string;
  yLabel: string;
  categories: string[];
  values: number[];
}): string {
  return renderOption({
    animation: false,
    title: { text: opts.title, left: 'center' },
    grid: { left: 90, right: 30, top: 60, bottom: 50 },
    xAxis: { type: 'category', data: opts.categories },
    yAxis: { type: 'value', name: opts.yLabel, nameLocation: 'middle', nameGap: 60 },
    series: [{ type: 'bar', data: opts.values, barWidth: '55%' }],
  });
}
