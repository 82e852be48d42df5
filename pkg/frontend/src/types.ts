// Wire types shared with the service: the project document schema, the
// physical-model payload, and validation findings.

export type TypeKind =
  | 'integer'
  | 'bigint'
  | 'float'
  | 'numeric'
  | 'varchar'
  | 'text'
  | 'boolean'
  | 'date'
  | 'timestamp';

export interface LogicalType {
  kind: TypeKind;
  length?: number;
  precision?: number;
  scale?: number;
}

export interface Attribute {
  name: string;
  type: LogicalType;
  pk: boolean;
  pid: boolean;
  mandatory: boolean;
  unique: boolean;
  auto: boolean;
  check?: string;
}

export interface Entity {
  id: string;
  name: string;
  weak: boolean;
  attributes: Attribute[];
}

export type MaxCard = '1' | 'N';

export interface RelEnd {
  entity: string;
  min: 0 | 1;
  max: MaxCard;
  role?: string;
}

export interface Relationship {
  id: string;
  name: string;
  ends: [RelEnd, RelEnd];
  attributes: Attribute[];
}

export type Strategy = 'complete' | 'concrete' | 'single';

export interface Hierarchy {
  id: string;
  super: string;
  subs: string[];
  strategy: Strategy;
}

export interface Point {
  x: number;
  y: number;
}

export interface Diagram {
  name: string;
  entities: Entity[];
  relationships: Relationship[];
  hierarchies: Hierarchy[];
  geometry: Record<string, Point>;
}

export interface ProjectDocument {
  format_version: number;
  meta: Record<string, string>;
  diagram: Diagram;
}

export interface Finding {
  severity: 'ERROR' | 'WARNING';
  code: string;
  path: string[];
  message: string;
}

export interface PhysicalColumn {
  name: string;
  type: LogicalType;
  nullable: boolean;
  auto: boolean;
  check?: string;
}

export interface PhysicalForeignKey {
  name: string;
  columns: string[];
  target_table: string;
  target_columns: string[];
}

export interface PhysicalTable {
  name: string;
  origin: { kind: string; ref: string };
  columns: PhysicalColumn[];
  primary_key: string[];
  uniques: string[][];
  checks: string[];
  foreign_keys: PhysicalForeignKey[];
}

export interface PhysicalModel {
  source_name: string;
  mode: string;
  tables: PhysicalTable[];
  deferred_foreign_keys: [string, string][];
}

export interface ComputeOk {
  valid: true;
  model: PhysicalModel;
}

export interface ComputeFindings {
  valid: false;
  findings: Finding[];
}

export type ComputeResult = ComputeOk | ComputeFindings;

export type GenerationMode = 'normal' | 'simplified';

export type Dialect = 'postgresql' | 'oracle' | 'mysql' | 'mariadb' | 'sqlite';

export const DIALECTS: Dialect[] = ['postgresql', 'oracle', 'mysql', 'mariadb', 'sqlite'];

export interface ProjectSummary {
  id: string;
  name: string;
  version: number;
  updated_at: string;
}

export interface ProjectRecord extends ProjectSummary {
  document: ProjectDocument;
}

export function emptyDiagram(name = 'untitled'): Diagram {
  return { name, entities: [], relationships: [], hierarchies: [], geometry: {} };
}

export function wrapDocument(diagram: Diagram): ProjectDocument {
  return { format_version: 1, meta: {}, diagram };
}
