/** Render-layer to draw-style mapping: a pure table so tests can pin it. */

import { RenderLayerName } from "./types";

export interface DrawStyle {
  kind: "solid" | "wireframe";
  color: number;
  opacity: number;
  hatched: boolean;
}

export const LAYER_STYLES: Record<RenderLayerName, DrawStyle> = {
  KeptSolid: { kind: "solid", color: 0xb8c4cc, opacity: 1.0, hatched: false },
  DiscardedWireframe: { kind: "wireframe", color: 0x6fbf73, opacity: 0.9, hatched: false },
  CapPoche: { kind: "solid", color: 0xe8e2d4, opacity: 1.0, hatched: true },
  RevealSolid: { kind: "solid", color: 0x8fb8d8, opacity: 1.0, hatched: false },
  HighlightRedWire: { kind: "wireframe", color: 0xd92b2b, opacity: 1.0, hatched: false },
  HighlightRedSolid: { kind: "solid", color: 0xd92b2b, opacity: 1.0, hatched: false },
};

export function styleFor(layer: RenderLayerName): DrawStyle {
  return LAYER_STYLES[layer];
}
