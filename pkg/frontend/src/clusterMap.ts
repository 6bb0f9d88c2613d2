/** Hand-rolled SVG cluster map: BS markers, scheduled edge users, and one
 * colored polyline group per cluster connecting members to their user. */

export interface ClusterDoc {
  bs: { id: number; x: number; y: number; kind: string }[];
  users: { id: number; x: number; y: number }[];
  clusters: { user_id: number; bs_ids: number[]; prb: number }[];
}

const PALETTE = [
  '#e6194b', '#3cb44b', '#4363d8', '#f58231', '#911eb4', '#46f0f0',
  '#f032e6', '#bcf60c', '#fabebe', '#008080', '#9a6324', '#800000',
  '#808000', '#000075', '#aaffc3', '#808080',
];

const WIDTH = 900;
const HEIGHT = 900;
const PAD = 40;

function esc(v: number): string {
  return v.toFixed(2);
}

export function validateClusterDoc(doc: unknown, name = 'clusters.json'): ClusterDoc {
  const d = doc as Partial<ClusterDoc>;
  for (const key of ['bs', 'users', 'clusters'] as const) {
    if (!Array.isArray(d[key])) {
      throw new Error(`${name}: missing or malformed "${key}" array`);
    }
  }
  if ((d.bs as unknown[]).length === 0) {
    throw new Error(`${name}: no base stations to draw`);
  }
  return d as ClusterDoc;
}

export function renderClusterMap(doc: ClusterDoc, title = 'Cooperating clusters'): string {
  const xs = [...doc.bs.map((b) => b.x), ...doc.users.map((u) => u.x)];
  const ys = [...doc.bs.map((b) => b.y), ...doc.users.map((u) => u.y)];
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const span = Math.max(maxX - minX, maxY - minY, 1);
  const scale = (WIDTH - 2 * PAD) / span;
  const sx = (x: number) => PAD + (x - minX) * scale;
  const sy = (y: number) => HEIGHT - PAD - (y - minY) * scale; // y grows upward

  const userPos = new Map(doc.users.map((u) => [u.id, u]));
  const bsPos = new Map(doc.bs.map((b) => [b.id, b]));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="100%" height="100%" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="18">${title}</text>`,
  );

  doc.clusters.forEach((cluster, i) => {
    const user = userPos.get(cluster.user_id);
    if (!user) {
      throw new Error(`cluster ${i}: user ${cluster.user_id} has no position`);
    }
    const color = PALETTE[i % PALETTE.length];
    const lines = cluster.bs_ids
      .map((id) => {
        const b = bsPos.get(id);
        if (!b) {
          throw new Error(`cluster ${i}: BS ${id} has no position`);
        }
        return `<line x1="${esc(sx(b.x))}" y1="${esc(sy(b.y))}" x2="${esc(sx(user.x))}" y2="${esc(sy(user.y))}" stroke="${color}" stroke-width="1.5"/>`;
      })
      .join('');
    parts.push(`<g class="cluster" data-user="${cluster.user_id}" data-prb="${cluster.prb}">${lines}</g>`);
  });

  for (const b of doc.bs) {
    const r = b.kind === 'macro' ? 7 : 4;
    const fill = b.kind === 'macro' ? '#2e7d32' : '#1565c0';
    parts.push(
      `<circle class="bs bs-${b.kind}" cx="${esc(sx(b.x))}" cy="${esc(sy(b.y))}" r="${r}" fill="${fill}"/>`,
    );
  }
  for (const u of doc.users) {
    const x = sx(u.x);
    const y = sy(u.y);
    parts.push(
      `<path class="user" d="M ${esc(x - 4)} ${esc(y)} L ${esc(x + 4)} ${esc(y)} M ${esc(x)} ${esc(y - 4)} L ${esc(x)} ${esc(y + 4)}" stroke="black" stroke-width="1.6"/>`,
    );
  }

  parts.push('</svg>');
  return parts.join('\n');
}
