/** Metadata inspector panel model: rows built from a pick response joined
 * with the model summary (layer materials live in the summary, element
 * category/family/parameters in the pick's inlined metadata). */

import { ModelSummary, PickResponse } from "./types";

export interface PanelRow {
  label: string;
  value: string;
}

export function buildPanelRows(pick: PickResponse,
                               model: ModelSummary): PanelRow[] {
  if (pick.hit === null) {
    return [];
  }
  const rows: PanelRow[] = [
    { label: "Element", value: pick.hit.element },
  ];
  const element = model.elements.find((e) => e.id === pick.hit!.element);
  if (pick.metadata) {
    rows.push({ label: "Category", value: pick.metadata.category });
    rows.push({ label: "Family", value: pick.metadata.family });
  } else if (element) {
    rows.push({ label: "Category", value: element.category });
    rows.push({ label: "Family", value: element.family });
  }
  if (pick.is_poche && element) {
    const layer = element.layers.find((l) => l.index === pick.hit!.layer);
    if (layer) {
      rows.push({ label: "Layer", value: `${pick.hit.layer} (${layer.material})` });
      rows.push({ label: "Material", value: layer.material });
    }
  }
  if (pick.metadata) {
    for (const key of Object.keys(pick.metadata.parameters).sort()) {
      rows.push({ label: key, value: pick.metadata.parameters[key] });
    }
  }
  return rows;
}
