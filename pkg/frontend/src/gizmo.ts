/** Pivot gizmo math: world axes expressed in the camera frame, projected to
 * screen-corner 2D vectors. Pure functions so the tracking behavior is
 * testable without a canvas. */

import { Mat3, Vec3 } from "./orbit";

/** World axes in camera coordinates: rows are R e_x, R e_y, R e_z. */
export function pivotAxes(rotation: Mat3): [Vec3, Vec3, Vec3] {
  const col = (k: number): Vec3 =>
    [rotation[0][k], rotation[1][k], rotation[2][k]];
  return [col(0), col(1), col(2)];
}

/** Orthographic screen projection of each world axis: x right, y up. */
export function gizmoScreenVectors(rotation: Mat3): [number, number][] {
  return pivotAxes(rotation).map((axis) => [axis[0], -axis[1]] as [number, number]);
}

export function screenAngleDeg(v: [number, number]): number {
  return (Math.atan2(v[1], v[0]) * 180) / Math.PI;
}

/** Smallest absolute angular difference in degrees. */
export function angleDiffDeg(a: number, b: number): number {
  let d = (a - b) % 360;
  if (d > 180) d -= 360;
  if (d < -180) d += 360;
  return Math.abs(d);
}
