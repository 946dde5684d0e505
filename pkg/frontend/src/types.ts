/** Wire types for the /api/v1 endpoints. */

export type AxisName = "x" | "y" | "z";
export type SignName = "pos" | "neg";
export type PlaneToken =
  | "x-pos" | "x-neg" | "y-pos" | "y-neg" | "z-pos" | "z-neg";
export type Mode = "inspect" | "section" | "reveal";

export const PLANE_TOKENS: PlaneToken[] = [
  "x-pos", "x-neg", "y-pos", "y-neg", "z-pos", "z-neg",
];

export function planeToken(axis: AxisName, sign: SignName): PlaneToken {
  return `${axis}-${sign}` as PlaneToken;
}

export function splitToken(token: PlaneToken): [AxisName, SignName] {
  const [axis, sign] = token.split("-");
  return [axis as AxisName, sign as SignName];
}

export interface LayerSummary {
  index: number;
  material: string;
  hatch: string;
  thickness_m: number;
  triangle_count: number;
}

export interface ElementSummary {
  id: string;
  category: string;
  family: string;
  layers: LayerSummary[];
  has_metadata: boolean;
}

export interface ModelSummary {
  aabb: { min: number[]; max: number[] };
  elements: ElementSummary[];
  units: string;
}

export interface GeometryBatch {
  element: string;
  layer: number;
  positions: number[];
  indices: number[];
}

export type RenderLayerName =
  | "KeptSolid" | "DiscardedWireframe" | "CapPoche"
  | "RevealSolid" | "HighlightRedWire" | "HighlightRedSolid";

export const RENDER_LAYER_NAMES: RenderLayerName[] = [
  "KeptSolid", "DiscardedWireframe", "CapPoche",
  "RevealSolid", "HighlightRedWire", "HighlightRedSolid",
];

export interface CapInfo {
  element: string;
  layer: number;
  plane: PlaneToken;
  area: number;
  open_profile: boolean;
  hatch: number[][][]; // 3D segment pairs
}

export interface PlaneState {
  axis: AxisName;
  sign: SignName;
  offset: number;
  active: boolean;
}

export interface SectionResponse {
  layers: Record<RenderLayerName, GeometryBatch[]>;
  caps: CapInfo[];
  box: { planes: PlaneState[] };
}

export interface PickHit {
  element: string;
  layer: number;
  distance: number;
  point: number[];
  normal: number[];
  source: "surface" | "cap";
}

export interface PickMetadata {
  element_id: string;
  category: string;
  family: string;
  parameters: Record<string, string>;
}

export interface PickResponse {
  hit: PickHit | null;
  is_poche: boolean;
  metadata: PickMetadata | null;
  highlight: {
    style: "red_wireframe" | "red_solid";
    element: string;
    layer: number | null;
    batches: { positions: number[]; indices: number[] }[];
  } | null;
}
