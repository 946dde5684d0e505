/** three.js scene synchronization from service geometry batches.
 *
 * The viewer never computes geometry: everything drawn here is exactly the
 * positions/indices the service returned, routed through the style table.
 */

import * as THREE from "three";

import { styleFor } from "./styles";
import { GeometryBatch, RENDER_LAYER_NAMES, SectionResponse } from "./types";

const GROUP_NAME = "section-content";

export class MalformedBatch extends Error {}

function batchGeometry(batch: GeometryBatch): THREE.BufferGeometry {
  if (batch.positions.length % 3 !== 0 || batch.indices.length % 3 !== 0) {
    throw new MalformedBatch(
      `batch ${batch.element}#${batch.layer} has ragged arrays`);
  }
  const maxIndex = batch.positions.length / 3;
  for (const i of batch.indices) {
    if (i < 0 || i >= maxIndex) {
      throw new MalformedBatch(
        `batch ${batch.element}#${batch.layer} index ${i} out of range`);
    }
  }
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute(
    "position", new THREE.Float32BufferAttribute(batch.positions, 3));
  geometry.setIndex(batch.indices);
  geometry.computeVertexNormals();
  return geometry;
}

/** Build the full drawable group for one section response. Throws
 * MalformedBatch without touching the scene, so callers can keep the
 * previous frame on bad input. */
export function buildSectionGroup(response: SectionResponse): THREE.Group {
  const group = new THREE.Group();
  group.name = GROUP_NAME;
  for (const layerName of RENDER_LAYER_NAMES) {
    const style = styleFor(layerName);
    for (const batch of response.layers[layerName] ?? []) {
      const geometry = batchGeometry(batch);
      let object: THREE.Object3D;
      if (style.kind === "wireframe") {
        const wire = new THREE.WireframeGeometry(geometry);
        object = new THREE.LineSegments(
          wire, new THREE.LineBasicMaterial({
            color: style.color, transparent: style.opacity < 1,
            opacity: style.opacity,
          }));
      } else {
        object = new THREE.Mesh(
          geometry, new THREE.MeshLambertMaterial({
            color: style.color, side: THREE.DoubleSide,
          }));
      }
      object.userData = { element: batch.element, layer: batch.layer,
                          renderLayer: layerName };
      group.add(object);
    }
  }
  // poche hatch strokes arrive as 3D segments per cap
  const hatchPoints: number[] = [];
  for (const cap of response.caps) {
    for (const [a, b] of cap.hatch) {
      hatchPoints.push(a[0], a[1], a[2], b[0], b[1], b[2]);
    }
  }
  if (hatchPoints.length) {
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute(
      "position", new THREE.Float32BufferAttribute(hatchPoints, 3));
    group.add(new THREE.LineSegments(
      geometry, new THREE.LineBasicMaterial({ color: 0x4a4a4a })));
  }
  return group;
}

/** Swap the drawable content of the scene; previous frame stays on error. */
export function syncScene(scene: THREE.Scene, response: SectionResponse): void {
  const fresh = buildSectionGroup(response); // may throw: scene untouched
  const old = scene.getObjectByName(GROUP_NAME);
  if (old) {
    scene.remove(old);
  }
  scene.add(fresh);
}
