// Crow's Foot cardinality glyphs. The maximum marker (bar or crow) sits next
// to the entity, the minimum marker (bar or circle) further out along the
// line: (0,1) circle+bar, (1,1) double bar, (0,N) circle+crow, (1,N) bar+crow.

import { MaxCard } from './types.js';

export type GlyphShape =
  | { kind: 'circle'; cx: number; cy: number; r: number }
  | { kind: 'path'; d: string };

const CROW_LENGTH = 14;
const CROW_SPREAD = 7;
const BAR_HALF = 6;
const MAX_MARK_AT = 10;
const MIN_MARK_AT = 20;
const CIRCLE_RADIUS = 4.5;

export function cardinalityGlyphs(
  x: number,
  y: number,
  dx: number,
  dy: number,
  min: 0 | 1,
  max: MaxCard,
): GlyphShape[] {
  // (dx, dy) is the unit direction from the entity border toward the line.
  const nx = -dy;
  const ny = dx;
  const shapes: GlyphShape[] = [];

  if (max === 'N') {
    const root = { x: x + dx * CROW_LENGTH, y: y + dy * CROW_LENGTH };
    shapes.push({
      kind: 'path',
      d:
        `M ${root.x} ${root.y} L ${x + nx * CROW_SPREAD} ${y + ny * CROW_SPREAD} ` +
        `M ${root.x} ${root.y} L ${x - nx * CROW_SPREAD} ${y - ny * CROW_SPREAD} ` +
        `M ${root.x} ${root.y} L ${x} ${y}`,
    });
  } else {
    const at = { x: x + dx * MAX_MARK_AT, y: y + dy * MAX_MARK_AT };
    shapes.push({
      kind: 'path',
      d: `M ${at.x + nx * BAR_HALF} ${at.y + ny * BAR_HALF} L ${at.x - nx * BAR_HALF} ${at.y - ny * BAR_HALF}`,
    });
  }

  const minAt = { x: x + dx * MIN_MARK_AT, y: y + dy * MIN_MARK_AT };
  if (min === 0) {
    shapes.push({
      kind: 'circle',
      cx: minAt.x + dx * CIRCLE_RADIUS,
      cy: minAt.y + dy * CIRCLE_RADIUS,
      r: CIRCLE_RADIUS,
    });
  } else {
    shapes.push({
      kind: 'path',
      d: `M ${minAt.x + nx * BAR_HALF} ${minAt.y + ny * BAR_HALF} L ${minAt.x - nx * BAR_HALF} ${minAt.y - ny * BAR_HALF}`,
    });
  }
  return shapes;
}
