// SVG rendering of the conceptual diagram: entity boxes, relationship lines
// with Crow's Foot glyphs, hierarchy connectors, finding badges.

import { cardinalityGlyphs } from './glyphs.js';
import { ViewState } from './state.js';
import { Diagram, Entity, Point } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export const ENTITY_WIDTH = 160;
const HEADER_HEIGHT = 26;
const ATTR_HEIGHT = 16;

export interface CanvasHandlers {
  onElementClick(id: string, event: MouseEvent): void;
  onCanvasClick(point: Point, event: MouseEvent): void;
  onElementDrag(id: string, point: Point): void;
}

export function entityHeight(entity: Entity): number {
  return HEADER_HEIGHT + Math.max(1, entity.attributes.length) * ATTR_HEIGHT;
}

export function entityPosition(diagram: Diagram, id: string, index: number): Point {
  const stored = diagram.geometry[id];
  if (stored) return stored;
  return { x: 48 + (index % 4) * 220, y: 48 + Math.floor(index / 4) * 180 };
}

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

function text(x: number, y: number, content: string, cls: string): SVGTextElement {
  const node = el('text', { x, y, class: cls });
  node.textContent = content;
  return node;
}

interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

function center(box: Box): Point {
  return { x: box.x + box.w / 2, y: box.y + box.h / 2 };
}

// Point where the segment from the box center toward `target` leaves the box.
function borderPoint(box: Box, target: Point): Point {
  const c = center(box);
  const dx = target.x - c.x;
  const dy = target.y - c.y;
  if (dx === 0 && dy === 0) return { x: c.x, y: box.y };
  const scaleX = dx !== 0 ? box.w / 2 / Math.abs(dx) : Infinity;
  const scaleY = dy !== 0 ? box.h / 2 / Math.abs(dy) : Infinity;
  const scale = Math.min(scaleX, scaleY);
  return { x: c.x + dx * scale, y: c.y + dy * scale };
}

function typeLabel(attr: Entity['attributes'][0]): string {
  const t = attr.type;
  if (t.kind === 'varchar') return `varchar(${t.length})`;
  if (t.kind === 'numeric') return `numeric(${t.precision},${t.scale})`;
  return t.kind;
}

export function renderCanvas(
  svg: SVGSVGElement,
  state: ViewState,
  badges: Set<string>,
  handlers: CanvasHandlers,
): void {
  svg.innerHTML = '';
  const diagram = state.diagram;
  const boxes = new Map<string, Box>();
  diagram.entities.forEach((entity, index) => {
    const at = entityPosition(diagram, entity.id, index);
    boxes.set(entity.id, { x: at.x, y: at.y, w: ENTITY_WIDTH, h: entityHeight(entity) });
  });

  const background = el('rect', {
    x: 0,
    y: 0,
    width: '100%',
    height: '100%',
    fill: 'transparent',
    'data-role': 'background',
  });
  background.addEventListener('mousedown', (event) => {
    const point = toDiagramPoint(svg, event);
    handlers.onCanvasClick(point, event);
  });
  svg.appendChild(background);

  // Hierarchy connectors underneath everything else.
  for (const h of diagram.hierarchies) {
    const superBox = boxes.get(h.super);
    if (!superBox) continue;
    const group = el('g', { class: 'hierarchy', 'data-id': h.id });
    const superC = center(superBox);
    const apex = { x: superC.x, y: superBox.y + superBox.h };
    for (const sub of h.subs) {
      const subBox = boxes.get(sub);
      if (!subBox) continue;
      const subTop = { x: center(subBox).x, y: subBox.y };
      group.appendChild(
        el('line', {
          x1: apex.x,
          y1: apex.y + 14,
          x2: subTop.x,
          y2: subTop.y,
          class: 'hierarchy-line',
        }),
      );
    }
    group.appendChild(
      el('path', {
        d: `M ${apex.x} ${apex.y} L ${apex.x - 12} ${apex.y + 14} L ${apex.x + 12} ${apex.y + 14} Z`,
        class: state.selection === h.id ? 'hierarchy-triangle selected' : 'hierarchy-triangle',
      }),
    );
    group.appendChild(text(apex.x + 16, apex.y + 12, h.strategy, 'hierarchy-label'));
    group.addEventListener('mousedown', (event) => {
      event.stopPropagation();
      handlers.onElementClick(h.id, event);
    });
    svg.appendChild(group);
  }

  for (const rel of diagram.relationships) {
    const boxA = boxes.get(rel.ends[0].entity);
    const boxB = boxes.get(rel.ends[1].entity);
    if (!boxA || !boxB) continue;
    const group = el('g', {
      class: state.selection === rel.id ? 'relationship selected' : 'relationship',
      'data-id': rel.id,
    });

    let pA: Point;
    let pB: Point;
    let labelAt: Point;
    if (rel.ends[0].entity === rel.ends[1].entity) {
      // Self-relationship: a loop off the right edge.
      pA = { x: boxA.x + boxA.w, y: boxA.y + 10 };
      pB = { x: boxA.x + boxA.w, y: boxA.y + boxA.h - 10 };
      const out = 46;
      group.appendChild(
        el('path', {
          d: `M ${pA.x} ${pA.y} C ${pA.x + out} ${pA.y}, ${pB.x + out} ${pB.y}, ${pB.x} ${pB.y}`,
          class: 'relationship-line',
        }),
      );
      labelAt = { x: pA.x + out + 4, y: (pA.y + pB.y) / 2 };
    } else {
      pA = borderPoint(boxA, center(boxB));
      pB = borderPoint(boxB, center(boxA));
      group.appendChild(
        el('line', { x1: pA.x, y1: pA.y, x2: pB.x, y2: pB.y, class: 'relationship-line' }),
      );
      labelAt = { x: (pA.x + pB.x) / 2, y: (pA.y + pB.y) / 2 - 6 };
    }

    for (const [point, other, end] of [
      [pA, pB, rel.ends[0]],
      [pB, pA, rel.ends[1]],
    ] as const) {
      const len = Math.hypot(other.x - point.x, other.y - point.y) || 1;
      const dx = (other.x - point.x) / len;
      const dy = (other.y - point.y) / len;
      for (const shape of cardinalityGlyphs(point.x, point.y, dx, dy, end.min, end.max)) {
        if (shape.kind === 'circle') {
          group.appendChild(
            el('circle', { cx: shape.cx, cy: shape.cy, r: shape.r, class: 'glyph glyph-circle' }),
          );
        } else {
          group.appendChild(el('path', { d: shape.d, class: 'glyph' }));
        }
      }
    }

    group.appendChild(text(labelAt.x, labelAt.y, rel.name, 'relationship-label'));
    if (badges.has(rel.id)) {
      group.appendChild(el('circle', { cx: labelAt.x - 10, cy: labelAt.y - 4, r: 5, class: 'badge' }));
    }
    group.addEventListener('mousedown', (event) => {
      event.stopPropagation();
      handlers.onElementClick(rel.id, event);
    });
    svg.appendChild(group);
  }

  diagram.entities.forEach((entity, index) => {
    const box = boxes.get(entity.id)!;
    const selected = state.selection === entity.id;
    const group = el('g', {
      class: selected ? 'entity selected' : 'entity',
      'data-id': entity.id,
      transform: `translate(${box.x}, ${box.y})`,
    });
    group.appendChild(
      el('rect', { x: 0, y: 0, width: box.w, height: box.h, rx: 4, class: 'entity-box' }),
    );
    if (entity.weak) {
      group.appendChild(
        el('rect', { x: 3, y: 3, width: box.w - 6, height: box.h - 6, rx: 3, class: 'entity-box-inner' }),
      );
    }
    group.appendChild(
      el('line', { x1: 0, y1: HEADER_HEIGHT, x2: box.w, y2: HEADER_HEIGHT, class: 'entity-divider' }),
    );
    group.appendChild(text(box.w / 2, 17, entity.name, 'entity-title'));
    entity.attributes.forEach((attr, i) => {
      const marker = attr.pk ? '●' : attr.pid ? '◐' : '○';
      group.appendChild(
        text(8, HEADER_HEIGHT + 12 + i * ATTR_HEIGHT, `${marker} ${attr.name}: ${typeLabel(attr)}`, 'entity-attr'),
      );
    });
    if (badges.has(entity.id)) {
      group.appendChild(el('circle', { cx: box.w - 8, cy: 8, r: 5, class: 'badge' }));
    }
    group.addEventListener('mousedown', (event) => {
      event.stopPropagation();
      handlers.onElementClick(entity.id, event);
      beginDrag(svg, entity.id, box, event, handlers);
    });
    svg.appendChild(group);
    void index;
  });
}

export function toDiagramPoint(svg: SVGSVGElement, event: MouseEvent): Point {
  const rect = svg.getBoundingClientRect();
  return { x: event.clientX - rect.left, y: event.clientY - rect.top };
}

function beginDrag(
  svg: SVGSVGElement,
  id: string,
  box: Box,
  start: MouseEvent,
  handlers: CanvasHandlers,
): void {
  const origin = toDiagramPoint(svg, start);
  const offset = { x: origin.x - box.x, y: origin.y - box.y };
  let moved = false;

  const onMove = (event: MouseEvent) => {
    moved = true;
    const at = toDiagramPoint(svg, event);
    handlers.onElementDrag(id, { x: at.x - offset.x, y: at.y - offset.y });
  };
  const onUp = () => {
    svg.ownerDocument.removeEventListener('mousemove', onMove);
    svg.ownerDocument.removeEventListener('mouseup', onUp);
    void moved;
  };
  svg.ownerDocument.addEventListener('mousemove', onMove);
  svg.ownerDocument.addEventListener('mouseup', onUp);
}
