// Property pane: editable fields for the selected entity, relationship, or
// hierarchy. Every edit is routed through the reducer via the apply callback.

import { Action, ViewState } from './state.js';
import { Attribute, Entity, Hierarchy, Relationship, TypeKind } from './types.js';

const TYPE_KINDS: TypeKind[] = [
  'integer',
  'bigint',
  'float',
  'numeric',
  'varchar',
  'text',
  'boolean',
  'date',
  'timestamp',
];

type Apply = (action: Action) => void;

function field(label: string, input: HTMLElement, parent: HTMLElement): void {
  const row = document.createElement('label');
  row.className = 'pane-field';
  const caption = document.createElement('span');
  caption.textContent = label;
  row.appendChild(caption);
  row.appendChild(input);
  parent.appendChild(row);
}

function textInput(value: string, onChange: (value: string) => void): HTMLInputElement {
  const input = document.createElement('input');
  input.type = 'text';
  input.value = value;
  input.addEventListener('change', () => onChange(input.value));
  return input;
}

function checkbox(checked: boolean, onChange: (value: boolean) => void): HTMLInputElement {
  const input = document.createElement('input');
  input.type = 'checkbox';
  input.checked = checked;
  input.addEventListener('change', () => onChange(input.checked));
  return input;
}

function select(
  options: string[],
  value: string,
  onChange: (value: string) => void,
): HTMLSelectElement {
  const node = document.createElement('select');
  for (const option of options) {
    const opt = document.createElement('option');
    opt.value = option;
    opt.textContent = option;
    node.appendChild(opt);
  }
  node.value = value;
  node.addEventListener('change', () => onChange(node.value));
  return node;
}

function button(label: string, cls: string, onClick: () => void): HTMLButtonElement {
  const node = document.createElement('button');
  node.type = 'button';
  node.className = cls;
  node.textContent = label;
  node.addEventListener('click', onClick);
  return node;
}

function attributeEditor(
  ownerId: string,
  attrs: Attribute[],
  parent: HTMLElement,
  apply: Apply,
  allowKeys: boolean,
): void {
  const title = document.createElement('h3');
  title.textContent = 'Attributes';
  parent.appendChild(title);

  attrs.forEach((attr, index) => {
    const box = document.createElement('div');
    box.className = 'attr-editor';
    const patch = (p: Partial<Attribute>) =>
      apply({ type: 'update-attribute', ownerId, index, patch: p });

    field('name', textInput(attr.name, (v) => patch({ name: v })), box);
    field(
      'type',
      select(TYPE_KINDS, attr.type.kind, (kind) => {
        const next: Attribute['type'] = { kind: kind as TypeKind };
        if (kind === 'varchar') next.length = attr.type.length ?? 50;
        if (kind === 'numeric') {
          next.precision = attr.type.precision ?? 10;
          next.scale = attr.type.scale ?? 2;
        }
        patch({ type: next, auto: false });
      }),
      box,
    );
    if (attr.type.kind === 'varchar') {
      const length = textInput(String(attr.type.length ?? 50), (v) =>
        patch({ type: { kind: 'varchar', length: parseInt(v, 10) || 0 } }),
      );
      length.className = 'narrow';
      field('length', length, box);
    }
    if (attr.type.kind === 'numeric') {
      const precision = textInput(String(attr.type.precision ?? 10), (v) =>
        patch({
          type: { kind: 'numeric', precision: parseInt(v, 10) || 0, scale: attr.type.scale ?? 0 },
        }),
      );
      precision.className = 'narrow';
      field('precision', precision, box);
      const scale = textInput(String(attr.type.scale ?? 0), (v) =>
        patch({
          type: { kind: 'numeric', precision: attr.type.precision ?? 1, scale: parseInt(v, 10) || 0 },
        }),
      );
      scale.className = 'narrow';
      field('scale', scale, box);
    }

    const flags = document.createElement('div');
    flags.className = 'attr-flags';
    if (allowKeys) {
      field('pk', checkbox(attr.pk, (v) => patch({ pk: v })), flags);
      field('pid', checkbox(attr.pid, (v) => patch({ pid: v })), flags);
    }
    field('mandatory', checkbox(attr.mandatory, (v) => patch({ mandatory: v })), flags);
    field('unique', checkbox(attr.unique, (v) => patch({ unique: v })), flags);
    if (allowKeys) {
      field('auto', checkbox(attr.auto, (v) => patch({ auto: v })), flags);
    }
    box.appendChild(flags);
    field(
      'check',
      textInput(attr.check ?? '', (v) => patch({ check: v.trim() === '' ? undefined : v })),
      box,
    );
    box.appendChild(
      button('remove attribute', 'danger small', () =>
        apply({ type: 'remove-attribute', ownerId, index }),
      ),
    );
    parent.appendChild(box);
  });

  parent.appendChild(
    button('add attribute', 'small', () => apply({ type: 'add-attribute', ownerId })),
  );
}

function renderEntityPane(
  pane: HTMLElement,
  state: ViewState,
  entity: Entity,
  apply: Apply,
): void {
  const title = document.createElement('h2');
  title.textContent = 'Entity';
  pane.appendChild(title);
  field('name', textInput(entity.name, (v) => apply({ type: 'rename-entity', id: entity.id, name: v })), pane);
  const weakToggle = checkbox(entity.weak, (v) => apply({ type: 'set-weak', id: entity.id, weak: v }));
  weakToggle.dataset.role = 'is-weak';
  field('is weak', weakToggle, pane);
  attributeEditor(entity.id, entity.attributes, pane, apply, true);
  pane.appendChild(
    button('delete entity', 'danger', () => apply({ type: 'delete-element', id: entity.id })),
  );
  void state;
}

function renderRelationshipPane(
  pane: HTMLElement,
  state: ViewState,
  rel: Relationship,
  apply: Apply,
): void {
  const title = document.createElement('h2');
  title.textContent = 'Relationship';
  pane.appendChild(title);
  field('name', textInput(rel.name, (v) => apply({ type: 'rename-relationship', id: rel.id, name: v })), pane);

  rel.ends.forEach((end, index) => {
    const endIndex = index as 0 | 1;
    const box = document.createElement('div');
    box.className = 'end-editor';
    const entity = state.diagram.entities.find((e) => e.id === end.entity);
    const caption = document.createElement('h3');
    caption.textContent = `End: ${entity?.name ?? end.entity}`;
    box.appendChild(caption);
    const min = select(['0', '1'], String(end.min), (v) =>
      apply({
        type: 'set-cardinality',
        relId: rel.id,
        end: endIndex,
        min: (parseInt(v, 10) as 0 | 1),
        max: end.max,
      }),
    );
    min.dataset.role = `min-${index}`;
    field('min', min, box);
    const max = select(['1', 'N'], end.max, (v) =>
      apply({
        type: 'set-cardinality',
        relId: rel.id,
        end: endIndex,
        min: end.min,
        max: v as '1' | 'N',
      }),
    );
    max.dataset.role = `max-${index}`;
    field('max', max, box);
    field('role', textInput(end.role ?? '', (v) => apply({ type: 'set-role', relId: rel.id, end: endIndex, role: v })), box);
    pane.appendChild(box);
  });

  attributeEditor(rel.id, rel.attributes, pane, apply, false);
  pane.appendChild(
    button('delete relationship', 'danger', () => apply({ type: 'delete-element', id: rel.id })),
  );
}

function renderHierarchyPane(
  pane: HTMLElement,
  state: ViewState,
  h: Hierarchy,
  apply: Apply,
): void {
  const title = document.createElement('h2');
  title.textContent = 'Hierarchy';
  pane.appendChild(title);
  const names = new Map(state.diagram.entities.map((e) => [e.id, e.name]));
  const info = document.createElement('p');
  info.textContent = `${names.get(h.super) ?? h.super} → ${h.subs
    .map((s) => names.get(s) ?? s)
    .join(', ')}`;
  pane.appendChild(info);

  const strategy = select(['complete', 'concrete', 'single'], h.strategy, (v) =>
    apply({ type: 'set-strategy', id: h.id, strategy: v as Hierarchy['strategy'] }),
  );
  strategy.dataset.role = 'strategy';
  field('strategy', strategy, pane);

  const candidates = state.diagram.entities.filter(
    (e) => e.id !== h.super && !h.subs.includes(e.id) && !e.weak,
  );
  if (candidates.length > 0) {
    const picker = select(
      ['', ...candidates.map((e) => e.id)],
      '',
      (id) => {
        if (id) apply({ type: 'add-sub', hierarchyId: h.id, subId: id });
      },
    );
    field('add sub', picker, pane);
  }
  pane.appendChild(
    button('delete hierarchy', 'danger', () => apply({ type: 'delete-element', id: h.id })),
  );
}

export function renderPanel(pane: HTMLElement, state: ViewState, apply: Apply): void {
  pane.innerHTML = '';
  const selection = state.selection;
  if (!selection) {
    const title = document.createElement('h2');
    title.textContent = 'Diagram';
    pane.appendChild(title);
    field(
      'name',
      textInput(state.diagram.name, (v) => apply({ type: 'rename-diagram', name: v })),
      pane,
    );
    const hint = document.createElement('p');
    hint.className = 'pane-hint';
    hint.textContent =
      'Pick a tool above, then click the canvas. Select any element to edit its properties here.';
    pane.appendChild(hint);
    return;
  }
  const entity = state.diagram.entities.find((e) => e.id === selection);
  if (entity) return renderEntityPane(pane, state, entity, apply);
  const rel = state.diagram.relationships.find((r) => r.id === selection);
  if (rel) return renderRelationshipPane(pane, state, rel, apply);
  const h = state.diagram.hierarchies.find((x) => x.id === selection);
  if (h) return renderHierarchyPane(pane, state, h, apply);
}
