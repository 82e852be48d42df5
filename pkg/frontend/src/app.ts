// Application controller: wires the reducer, the canvas, the property pane,
// the server views, debounced auto-save, and latest-wins compute refreshes.

import { OndaApi, VersionConflict } from './api.js';
import { renderCanvas, toDiagramPoint } from './canvas.js';
import { renderPanel } from './panel.js';
import { Action, Tab, ViewState, dispatch, initialState } from './state.js';
import { Dialect, Finding, GenerationMode, Point, wrapDocument } from './types.js';
import { findingBadgeIds, renderFindings, renderPhysicalView, renderScriptView } from './views.js';

export type Tool = 'select' | 'entity' | 'rel' | 'hierarchy';

export interface AppOptions {
  autosaveDelayMs?: number;
  onConflict?: (currentVersion: number) => boolean; // true = reload server copy
}

const DEFAULT_AUTOSAVE_MS = 2000;

const UNDO_LIMIT = 50;

export class OndaApp {
  state: ViewState = initialState();
  tool: Tool = 'select';
  findings: Finding[] | null = null;
  lastError: string | null = null;

  private pendingLink: string | null = null; // first endpoint for rel/hierarchy tools
  private undoStack: ViewState['diagram'][] = [];
  private saveTimer: ReturnType<typeof setTimeout> | null = null;
  private saving: Promise<void> = Promise.resolve();
  private computeEpoch = 0;
  private autosaveDelay: number;
  private onConflict: (currentVersion: number) => boolean;

  constructor(
    private root: Document | HTMLElement,
    private api: OndaApi,
    options: AppOptions = {},
  ) {
    this.autosaveDelay = options.autosaveDelayMs ?? DEFAULT_AUTOSAVE_MS;
    this.onConflict =
      options.onConflict ??
      ((version) =>
        (globalThis as { confirm?: (msg: string) => boolean }).confirm?.(
          `Someone else saved version ${version}. Load their copy? (Cancel keeps editing.)`,
        ) ?? true);
    this.bindChrome();
    this.render();
  }

  private query<T extends Element>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  private bindChrome(): void {
    for (const tab of ['conceptual', 'physical', 'script'] as Tab[]) {
      this.query<HTMLButtonElement>(`[data-tab="${tab}"]`).addEventListener('click', () => {
        void this.setTab(tab);
      });
    }
    for (const tool of ['select', 'entity', 'rel', 'hierarchy'] as Tool[]) {
      this.query<HTMLButtonElement>(`[data-tool="${tool}"]`).addEventListener('click', () => {
        this.tool = tool;
        this.pendingLink = null;
        this.render();
      });
    }
    this.query<HTMLSelectElement>('[data-role="mode"]').addEventListener('change', (event) => {
      const mode = (event.target as HTMLSelectElement).value as GenerationMode;
      this.apply({ type: 'set-mode', mode });
      void this.refreshIfServerTab();
    });
    this.query<HTMLSelectElement>('[data-role="dialect"]').addEventListener('change', (event) => {
      const dialect = (event.target as HTMLSelectElement).value as Dialect;
      this.apply({ type: 'set-dialect', dialect });
      void this.refreshIfServerTab();
    });
    const doc = this.root instanceof Document ? this.root : this.root.ownerDocument;
    doc?.addEventListener('keydown', this.handleKeydown);
  }

  private handleKeydown = (event: KeyboardEvent): void => {
    if ((event.ctrlKey || event.metaKey) && event.key.toLowerCase() === 'z') {
      const target = event.target as HTMLElement | null;
      if (target && (target.tagName === 'INPUT' || target.tagName === 'SELECT')) return;
      event.preventDefault();
      this.undo();
    }
  };

  apply(action: Action): boolean {
    const { state, error } = dispatch(this.state, action);
    const before = this.state;
    this.state = state;
    this.lastError = error ?? null;
    if (error) {
      this.render();
      return false;
    }
    if (state.diagram !== before.diagram && state.dirty) {
      if (action.type !== 'load-document') {
        this.undoStack.push(before.diagram);
        if (this.undoStack.length > UNDO_LIMIT) this.undoStack.shift();
      }
      this.scheduleSave();
      this.findings = null; // stale until the next compute
    }
    if (action.type === 'load-document') this.undoStack = [];
    this.render();
    return true;
  }

  canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  undo(): boolean {
    const previous = this.undoStack.pop();
    if (!previous) return false;
    this.state = { ...this.state, diagram: previous, dirty: true, selection: null };
    this.findings = null;
    this.scheduleSave();
    this.render();
    return true;
  }

  async setTab(tab: Tab): Promise<void> {
    this.apply({ type: 'set-tab', tab });
    if (tab !== 'conceptual') {
      await this.refreshViews();
    }
  }

  private async refreshIfServerTab(): Promise<void> {
    if (this.state.activeTab !== 'conceptual') {
      await this.refreshViews();
    }
  }

  // Post the current document to the compute endpoints and render whatever
  // the server answered; stale responses lose to newer ones.
  async refreshViews(): Promise<void> {
    const epoch = ++this.computeEpoch;
    const document = wrapDocument(this.state.diagram);
    try {
      const [physical, sql] = await Promise.all([
        this.api.computePhysical(document, this.state.mode),
        this.api.computeSql(document, this.state.mode, this.state.dialect),
      ]);
      if (epoch !== this.computeEpoch) return;
      if (!physical.valid) {
        this.findings = physical.findings;
        renderPhysicalView(this.query('[data-view="physical"]'), null);
        renderScriptView(this.query('[data-view="script"]'), null);
      } else {
        this.findings = null;
        renderPhysicalView(this.query('[data-view="physical"]'), physical.model);
        renderScriptView(
          this.query('[data-view="script"]'),
          'sql' in sql ? sql.sql : null,
        );
      }
      this.render();
    } catch (err) {
      if (epoch !== this.computeEpoch) return;
      if ((err as Error).name === 'AbortError') return;
      this.lastError = `compute failed: ${(err as Error).message}`;
      this.render();
    }
  }

  // --- persistence -----------------------------------------------------

  async newProject(name: string): Promise<void> {
    const record = await this.api.createProject(name, wrapDocument(this.state.diagram));
    this.state = dispatch(this.state, {
      type: 'load-document',
      diagram: record.document.diagram,
      projectId: record.id,
      serverVersion: record.version,
    }).state;
    this.render();
  }

  async openProject(id: string): Promise<void> {
    const record = await this.api.getProject(id);
    this.state = dispatch(this.state, {
      type: 'load-document',
      diagram: record.document.diagram,
      projectId: record.id,
      serverVersion: record.version,
    }).state;
    this.render();
  }

  private scheduleSave(): void {
    if (!this.state.projectId) return;
    if (this.saveTimer) clearTimeout(this.saveTimer);
    this.saveTimer = setTimeout(() => {
      void this.flushSave();
    }, this.autosaveDelay);
  }

  // Serialized: at most one save request in flight.
  flushSave(): Promise<void> {
    if (this.saveTimer) {
      clearTimeout(this.saveTimer);
      this.saveTimer = null;
    }
    this.saving = this.saving.then(() => this.performSave());
    return this.saving;
  }

  private async performSave(): Promise<void> {
    const projectId = this.state.projectId;
    if (!projectId || !this.state.dirty) return;
    try {
      const record = await this.api.saveProject(
        projectId,
        wrapDocument(this.state.diagram),
        this.state.serverVersion,
      );
      this.state = dispatch(this.state, { type: 'mark-saved', serverVersion: record.version }).state;
      this.render();
    } catch (err) {
      if (err instanceof VersionConflict) {
        if (this.onConflict(err.currentVersion)) {
          await this.openProject(projectId);
        }
        return;
      }
      this.lastError = `save failed: ${(err as Error).message}`;
      this.render();
    }
  }

  // --- canvas interaction ------------------------------------------------

  private handleElementClick(id: string): void {
    if (this.tool === 'rel' || this.tool === 'hierarchy') {
      const isEntity = this.state.diagram.entities.some((e) => e.id === id);
      if (!isEntity) return;
      if (this.pendingLink === null) {
        this.pendingLink = id;
        this.apply({ type: 'select', id });
        return;
      }
      const first = this.pendingLink;
      this.pendingLink = null;
      if (this.tool === 'rel') {
        this.apply({ type: 'connect-relationship', a: first, b: id });
      } else {
        this.apply({ type: 'connect-hierarchy', superId: first, subId: id });
      }
      return;
    }
    this.apply({ type: 'select', id });
  }

  private handleCanvasClick(point: Point): void {
    if (this.tool === 'entity') {
      this.apply({ type: 'place-entity', point });
      return;
    }
    this.pendingLink = null;
    this.apply({ type: 'select', id: null });
  }

  // --- rendering ---------------------------------------------------------

  render(): void {
    const state = this.state;
    for (const tab of ['conceptual', 'physical', 'script'] as Tab[]) {
      this.query<HTMLButtonElement>(`[data-tab="${tab}"]`).classList.toggle(
        'active',
        state.activeTab === tab,
      );
      this.query<HTMLElement>(`[data-pane="${tab}"]`).classList.toggle(
        'hidden',
        state.activeTab !== tab,
      );
    }
    for (const tool of ['select', 'entity', 'rel', 'hierarchy'] as Tool[]) {
      this.query<HTMLButtonElement>(`[data-tool="${tool}"]`).classList.toggle(
        'active',
        this.tool === tool,
      );
    }
    this.query<HTMLSelectElement>('[data-role="mode"]').value = state.mode;
    this.query<HTMLSelectElement>('[data-role="dialect"]').value = state.dialect;

    const status = this.query<HTMLElement>('[data-role="status"]');
    if (this.lastError) {
      status.textContent = this.lastError;
      status.className = 'status error';
    } else if (state.dirty) {
      status.textContent = 'unsaved changes';
      status.className = 'status dirty';
    } else if (state.projectId) {
      status.textContent = `saved (v${state.serverVersion})`;
      status.className = 'status saved';
    } else {
      status.textContent = 'scratch diagram (not stored)';
      status.className = 'status';
    }

    const svg = this.query<SVGSVGElement>('svg[data-role="canvas"]');
    renderCanvas(svg, state, findingBadgeIds(this.findings), {
      onElementClick: (id) => this.handleElementClick(id),
      onCanvasClick: (point) => this.handleCanvasClick(point),
      onElementDrag: (id, point) => this.apply({ type: 'move-element', id, point }),
    });
    void toDiagramPoint; // re-exported for canvas handlers

    renderPanel(this.query('[data-role="panel"]'), state, (action) => this.apply(action));
    renderFindings(this.query('[data-role="findings"]'), this.findings, (id) => {
      this.apply({ type: 'select', id });
      void this.setTab('conceptual');
    });
  }
}
