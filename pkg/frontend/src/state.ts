// Editor state and the reducer every edit goes through. Actions that would
// break a modeling rule the server is known to reject are refused here with
// a message, so the canvas never holds obviously broken structure.

import {
  Attribute,
  Diagram,
  Dialect,
  Entity,
  GenerationMode,
  Hierarchy,
  MaxCard,
  Point,
  Relationship,
  Strategy,
  emptyDiagram,
} from './types.js';

export type Tab = 'conceptual' | 'physical' | 'script';

export interface ViewState {
  activeTab: Tab;
  diagram: Diagram;
  selection: string | null;
  mode: GenerationMode;
  dialect: Dialect;
  dirty: boolean;
  projectId: string | null;
  serverVersion: number;
}

export function initialState(): ViewState {
  return {
    activeTab: 'conceptual',
    diagram: emptyDiagram(),
    selection: null,
    mode: 'normal',
    dialect: 'postgresql',
    dirty: false,
    projectId: null,
    serverVersion: 0,
  };
}

export type Action =
  | { type: 'place-entity'; point: Point }
  | { type: 'rename-entity'; id: string; name: string }
  | { type: 'set-weak'; id: string; weak: boolean }
  | { type: 'add-attribute'; ownerId: string }
  | { type: 'update-attribute'; ownerId: string; index: number; patch: Partial<Attribute> }
  | { type: 'remove-attribute'; ownerId: string; index: number }
  | { type: 'connect-relationship'; a: string; b: string }
  | { type: 'rename-relationship'; id: string; name: string }
  | { type: 'set-cardinality'; relId: string; end: 0 | 1; min: 0 | 1; max: MaxCard }
  | { type: 'set-role'; relId: string; end: 0 | 1; role: string }
  | { type: 'connect-hierarchy'; superId: string; subId: string }
  | { type: 'add-sub'; hierarchyId: string; subId: string }
  | { type: 'set-strategy'; id: string; strategy: Strategy }
  | { type: 'move-element'; id: string; point: Point }
  | { type: 'delete-element'; id: string }
  | { type: 'select'; id: string | null }
  | { type: 'rename-diagram'; name: string }
  | { type: 'set-tab'; tab: Tab }
  | { type: 'set-mode'; mode: GenerationMode }
  | { type: 'set-dialect'; dialect: Dialect }
  | { type: 'load-document'; diagram: Diagram; projectId: string | null; serverVersion: number }
  | { type: 'mark-saved'; serverVersion: number };

export interface DispatchResult {
  state: ViewState;
  error?: string;
}

export function normalizeName(name: string): string {
  const folded = name
    .normalize('NFKD')
    .replace(/[̀-ͯ]/g, '')
    .toLowerCase();
  const cleaned = folded.replace(/[^a-z0-9]+/g, '_').replace(/^_+|_+$/g, '');
  if (!cleaned) return 'unnamed';
  return /^[a-z]/.test(cleaned) ? cleaned : 'x' + cleaned;
}

function nextNumbered(prefix: string, existing: string[]): number {
  let max = 0;
  const pattern = new RegExp(`^${prefix}(\\d+)$`);
  for (const value of existing) {
    const hit = pattern.exec(value);
    if (hit) max = Math.max(max, parseInt(hit[1], 10));
  }
  return max + 1;
}

function cloneDiagram(diagram: Diagram): Diagram {
  return JSON.parse(JSON.stringify(diagram)) as Diagram;
}

function findEntity(diagram: Diagram, id: string): Entity | undefined {
  return diagram.entities.find((e) => e.id === id);
}

function findOwnerAttributes(diagram: Diagram, ownerId: string): Attribute[] | undefined {
  const entity = findEntity(diagram, ownerId);
  if (entity) return entity.attributes;
  const rel = diagram.relationships.find((r) => r.id === ownerId);
  return rel?.attributes;
}

function reject(state: ViewState, error: string): DispatchResult {
  return { state, error };
}

function accept(state: ViewState, diagram: Diagram, selection?: string | null): DispatchResult {
  return {
    state: {
      ...state,
      diagram,
      dirty: true,
      selection: selection === undefined ? state.selection : selection,
    },
  };
}

export function dispatch(state: ViewState, action: Action): DispatchResult {
  switch (action.type) {
    case 'place-entity': {
      const diagram = cloneDiagram(state.diagram);
      const n = nextNumbered('Entity', diagram.entities.map((e) => e.name));
      const idN = nextNumbered('e', diagram.entities.map((e) => e.id));
      const entity: Entity = { id: `e${idN}`, name: `Entity${n}`, weak: false, attributes: [] };
      diagram.entities.push(entity);
      diagram.geometry[entity.id] = { x: action.point.x, y: action.point.y };
      return accept(state, diagram, entity.id);
    }

    case 'rename-entity': {
      const name = action.name.trim();
      if (!name) return reject(state, 'entity name cannot be empty');
      const normalized = normalizeName(name);
      const clash = state.diagram.entities.find(
        (e) => e.id !== action.id && normalizeName(e.name) === normalized,
      );
      if (clash) return reject(state, `name collides with ${clash.name}`);
      const diagram = cloneDiagram(state.diagram);
      const entity = findEntity(diagram, action.id);
      if (!entity) return reject(state, 'entity no longer exists');
      entity.name = name;
      return accept(state, diagram);
    }

    case 'set-weak': {
      const diagram = cloneDiagram(state.diagram);
      const entity = findEntity(diagram, action.id);
      if (!entity) return reject(state, 'entity no longer exists');
      if (action.weak && entity.attributes.some((a) => a.pk)) {
        return reject(state, 'a weak entity cannot keep a primary key; clear pk flags first');
      }
      if (action.weak && diagram.hierarchies.some(
        (h) => h.super === action.id || h.subs.includes(action.id),
      )) {
        return reject(state, 'an entity in a hierarchy cannot be weak');
      }
      entity.weak = action.weak;
      if (!action.weak) {
        for (const attr of entity.attributes) attr.pid = false;
      }
      return accept(state, diagram);
    }

    case 'add-attribute': {
      const diagram = cloneDiagram(state.diagram);
      const attrs = findOwnerAttributes(diagram, action.ownerId);
      if (!attrs) return reject(state, 'element no longer exists');
      const n = nextNumbered('attr', attrs.map((a) => a.name));
      attrs.push({
        name: `attr${n}`,
        type: { kind: 'varchar', length: 50 },
        pk: false,
        pid: false,
        mandatory: false,
        unique: false,
        auto: false,
      });
      return accept(state, diagram);
    }

    case 'update-attribute': {
      const diagram = cloneDiagram(state.diagram);
      const attrs = findOwnerAttributes(diagram, action.ownerId);
      const attr = attrs?.[action.index];
      if (!attrs || !attr) return reject(state, 'attribute no longer exists');
      const next: Attribute = { ...attr, ...action.patch };
      const owner = findEntity(diagram, action.ownerId);
      if (next.name.trim() === '') return reject(state, 'attribute name cannot be empty');
      const normalized = normalizeName(next.name);
      if (attrs.some((a, i) => i !== action.index && normalizeName(a.name) === normalized)) {
        return reject(state, `duplicate attribute name ${next.name}`);
      }
      if (next.pk) {
        if (!owner) return reject(state, 'relationship attributes cannot be keys');
        if (owner.weak) return reject(state, 'a weak entity cannot declare a primary key');
        next.mandatory = true; // a key can never be null
        next.pid = false;
      }
      if (next.pid && (!owner || !owner.weak)) {
        return reject(state, 'partial identifiers only apply to weak entities');
      }
      if (next.auto) {
        if (!owner) return reject(state, 'relationship attributes cannot auto-increment');
        if (next.type.kind !== 'integer' && next.type.kind !== 'bigint') {
          return reject(state, 'auto-increment needs an integer or bigint type');
        }
        if (!next.pk) return reject(state, 'auto-increment is only supported on the primary key');
      }
      if (next.type.kind === 'varchar' && !(next.type.length && next.type.length >= 1)) {
        return reject(state, 'varchar needs a length of at least 1');
      }
      if (next.type.kind === 'numeric') {
        const p = next.type.precision ?? 0;
        const s = next.type.scale ?? -1;
        if (p < 1 || s < 0 || s > p) return reject(state, 'numeric needs precision >= 1 and 0 <= scale <= precision');
      }
      attrs[action.index] = next;
      return accept(state, diagram);
    }

    case 'remove-attribute': {
      const diagram = cloneDiagram(state.diagram);
      const attrs = findOwnerAttributes(diagram, action.ownerId);
      if (!attrs || action.index >= attrs.length) return reject(state, 'attribute no longer exists');
      attrs.splice(action.index, 1);
      return accept(state, diagram);
    }

    case 'connect-relationship': {
      if (!findEntity(state.diagram, action.a) || !findEntity(state.diagram, action.b)) {
        return reject(state, 'both endpoints must still exist');
      }
      const diagram = cloneDiagram(state.diagram);
      const n = nextNumbered('Rel', diagram.relationships.map((r) => r.name));
      const idN = nextNumbered('r', diagram.relationships.map((r) => r.id));
      const selfRel = action.a === action.b;
      const rel: Relationship = {
        id: `r${idN}`,
        name: `Rel${n}`,
        ends: [
          { entity: action.a, min: 0, max: 'N', ...(selfRel ? { role: 'left' } : {}) },
          { entity: action.b, min: 0, max: 'N', ...(selfRel ? { role: 'right' } : {}) },
        ],
        attributes: [],
      };
      diagram.relationships.push(rel);
      return accept(state, diagram, rel.id);
    }

    case 'rename-relationship': {
      const diagram = cloneDiagram(state.diagram);
      const rel = diagram.relationships.find((r) => r.id === action.id);
      if (!rel) return reject(state, 'relationship no longer exists');
      if (!action.name.trim()) return reject(state, 'relationship name cannot be empty');
      rel.name = action.name.trim();
      return accept(state, diagram);
    }

    case 'set-cardinality': {
      const diagram = cloneDiagram(state.diagram);
      const rel = diagram.relationships.find((r) => r.id === action.relId);
      if (!rel) return reject(state, 'relationship no longer exists');
      if (action.min !== 0 && action.min !== 1) return reject(state, 'min must be 0 or 1');
      if (action.max !== '1' && action.max !== 'N') return reject(state, 'max must be 1 or N');
      rel.ends[action.end] = { ...rel.ends[action.end], min: action.min, max: action.max };
      return accept(state, diagram);
    }

    case 'set-role': {
      const diagram = cloneDiagram(state.diagram);
      const rel = diagram.relationships.find((r) => r.id === action.relId);
      if (!rel) return reject(state, 'relationship no longer exists');
      const selfRel = rel.ends[0].entity === rel.ends[1].entity;
      const other = rel.ends[1 - action.end].role ?? '';
      if (selfRel && (!action.role.trim() || action.role.trim() === other)) {
        return reject(state, 'self-relationship roles must be distinct and non-empty');
      }
      const role = action.role.trim();
      if (role) {
        rel.ends[action.end] = { ...rel.ends[action.end], role };
      } else {
        const { role: _dropped, ...rest } = rel.ends[action.end];
        rel.ends[action.end] = rest as typeof rel.ends[0];
      }
      return accept(state, diagram);
    }

    case 'connect-hierarchy': {
      const superE = findEntity(state.diagram, action.superId);
      const subE = findEntity(state.diagram, action.subId);
      if (!superE || !subE) return reject(state, 'both entities must still exist');
      if (action.superId === action.subId) return reject(state, 'an entity cannot be its own sub');
      if (superE.weak || subE.weak) return reject(state, 'weak entities cannot join a hierarchy');
      if (state.diagram.hierarchies.some((h) => h.subs.includes(action.subId))) {
        return reject(state, `${subE.name} is already a sub-entity`);
      }
      if (subE.attributes.some((a) => a.pk)) {
        return reject(state, 'a sub-entity inherits its key; clear its pk flags first');
      }
      const diagram = cloneDiagram(state.diagram);
      const idN = nextNumbered('h', diagram.hierarchies.map((h) => h.id));
      const h: Hierarchy = {
        id: `h${idN}`,
        super: action.superId,
        subs: [action.subId],
        strategy: 'complete',
      };
      diagram.hierarchies.push(h);
      return accept(state, diagram, h.id);
    }

    case 'add-sub': {
      const diagram = cloneDiagram(state.diagram);
      const h = diagram.hierarchies.find((x) => x.id === action.hierarchyId);
      const subE = findEntity(diagram, action.subId);
      if (!h || !subE) return reject(state, 'element no longer exists');
      if (h.super === action.subId) return reject(state, 'an entity cannot be its own sub');
      if (subE.weak) return reject(state, 'weak entities cannot join a hierarchy');
      if (diagram.hierarchies.some((x) => x.subs.includes(action.subId))) {
        return reject(state, `${subE.name} is already a sub-entity`);
      }
      if (subE.attributes.some((a) => a.pk)) {
        return reject(state, 'a sub-entity inherits its key; clear its pk flags first');
      }
      h.subs.push(action.subId);
      return accept(state, diagram);
    }

    case 'set-strategy': {
      const diagram = cloneDiagram(state.diagram);
      const h = diagram.hierarchies.find((x) => x.id === action.id);
      if (!h) return reject(state, 'hierarchy no longer exists');
      h.strategy = action.strategy;
      return accept(state, diagram);
    }

    case 'move-element': {
      const diagram = cloneDiagram(state.diagram);
      diagram.geometry[action.id] = { x: action.point.x, y: action.point.y };
      return accept(state, diagram);
    }

    case 'delete-element': {
      const diagram = cloneDiagram(state.diagram);
      const id = action.id;
      if (findEntity(diagram, id)) {
        diagram.entities = diagram.entities.filter((e) => e.id !== id);
        diagram.relationships = diagram.relationships.filter(
          (r) => r.ends[0].entity !== id && r.ends[1].entity !== id,
        );
        diagram.hierarchies = diagram.hierarchies
          .filter((h) => h.super !== id)
          .map((h) => ({ ...h, subs: h.subs.filter((s) => s !== id) }))
          .filter((h) => h.subs.length > 0);
      } else {
        diagram.relationships = diagram.relationships.filter((r) => r.id !== id);
        diagram.hierarchies = diagram.hierarchies.filter((h) => h.id !== id);
      }
      const kept = new Set([
        ...diagram.entities.map((e) => e.id),
        ...diagram.relationships.map((r) => r.id),
        ...diagram.hierarchies.map((h) => h.id),
      ]);
      for (const key of Object.keys(diagram.geometry)) {
        if (!kept.has(key)) delete diagram.geometry[key];
      }
      return accept(state, diagram, state.selection === id ? null : state.selection);
    }

    case 'select':
      return { state: { ...state, selection: action.id } };

    case 'rename-diagram': {
      const diagram = cloneDiagram(state.diagram);
      diagram.name = action.name.trim() || 'untitled';
      return accept(state, diagram);
    }

    case 'set-tab':
      return { state: { ...state, activeTab: action.tab } };

    case 'set-mode':
      return { state: { ...state, mode: action.mode } };

    case 'set-dialect':
      return { state: { ...state, dialect: action.dialect } };

    case 'load-document':
      return {
        state: {
          ...state,
          diagram: cloneDiagram(action.diagram),
          selection: null,
          dirty: false,
          projectId: action.projectId,
          serverVersion: action.serverVersion,
        },
      };

    case 'mark-saved':
      return { state: { ...state, dirty: false, serverVersion: action.serverVersion } };
  }
}
