// Physical-model and script views plus the findings panel. Both views are
// pure projections of service responses; nothing is computed locally.

import { Finding, LogicalType, PhysicalModel } from './types.js';

function typeText(t: LogicalType): string {
  if (t.kind === 'varchar') return `varchar(${t.length})`;
  if (t.kind === 'numeric') return `numeric(${t.precision},${t.scale})`;
  return t.kind;
}

function div(cls: string, parent?: HTMLElement): HTMLDivElement {
  const node = document.createElement('div');
  node.className = cls;
  if (parent) parent.appendChild(node);
  return node;
}

export function renderPhysicalView(container: HTMLElement, model: PhysicalModel | null): void {
  container.innerHTML = '';
  if (!model) return;
  if (model.tables.length === 0) {
    const empty = div('view-empty', container);
    empty.textContent = 'The physical model has no tables yet.';
    return;
  }
  for (const table of model.tables) {
    const card = div('table-card', container);
    card.dataset.table = table.name;
    const header = div('table-card-header', card);
    header.textContent = table.name;
    const pk = new Set(table.primary_key);
    const fkCols = new Set(table.foreign_keys.flatMap((fk) => fk.columns));
    for (const column of table.columns) {
      const row = div('table-card-row', card);
      const badges = div('col-badges', row);
      if (pk.has(column.name)) badges.appendChild(badge('pk'));
      if (fkCols.has(column.name)) badges.appendChild(badge('fk'));
      const name = document.createElement('span');
      name.className = 'col-name';
      name.textContent = column.name;
      row.appendChild(name);
      const type = document.createElement('span');
      type.className = 'col-type';
      type.textContent = typeText(column.type) + (column.nullable ? '' : ' not null');
      row.appendChild(type);
    }
    for (const fk of table.foreign_keys) {
      const row = div('table-card-fk', card);
      row.textContent = `→ ${fk.target_table} (${fk.columns.join(', ')})`;
    }
  }
}

function badge(kind: string): HTMLSpanElement {
  const node = document.createElement('span');
  node.className = `badge-${kind}`;
  node.textContent = kind.toUpperCase();
  return node;
}

const SQL_KEYWORDS =
  /\b(CREATE TABLE|PRIMARY KEY|FOREIGN KEY|REFERENCES|CONSTRAINT|NOT NULL|UNIQUE|CHECK|ALTER TABLE|ADD|DROP TABLE IF EXISTS)\b/g;

export function renderScriptView(container: HTMLElement, sql: string | null): void {
  container.innerHTML = '';
  if (sql === null) return;
  const pre = document.createElement('pre');
  pre.className = 'script-text';
  if (sql === '') {
    pre.textContent = '-- empty script';
  } else {
    let last = 0;
    for (const match of sql.matchAll(SQL_KEYWORDS)) {
      pre.appendChild(document.createTextNode(sql.slice(last, match.index)));
      const span = document.createElement('span');
      span.className = 'sql-keyword';
      span.textContent = match[0];
      pre.appendChild(span);
      last = (match.index ?? 0) + match[0].length;
    }
    pre.appendChild(document.createTextNode(sql.slice(last)));
  }
  container.appendChild(pre);
}

export function renderFindings(
  container: HTMLElement,
  findings: Finding[] | null,
  onJump: (elementId: string) => void,
): void {
  container.innerHTML = '';
  if (!findings || findings.length === 0) {
    container.classList.add('hidden');
    return;
  }
  container.classList.remove('hidden');
  const title = div('findings-title', container);
  title.textContent = 'The diagram has problems; fix them to generate output.';
  for (const finding of findings) {
    const row = div(`finding finding-${finding.severity.toLowerCase()}`, container);
    row.textContent = `${finding.severity} ${finding.code} ${finding.path.join('/')}: ${finding.message}`;
    row.addEventListener('click', () => {
      if (finding.path.length > 0) onJump(finding.path[0]);
    });
  }
}

export function findingBadgeIds(findings: Finding[] | null): Set<string> {
  const ids = new Set<string>();
  for (const finding of findings ?? []) {
    if (finding.path.length > 0) ids.add(finding.path[0]);
  }
  return ids;
}
