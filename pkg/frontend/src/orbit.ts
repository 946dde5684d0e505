/** Orbit camera math (Z-up world, CV-style camera frame: x right, y down,
 * z forward). The rotation rows are the camera axes in world coordinates,
 * so p_cam = R (p - eye). */

import { OrbitParams } from "./state";

export type Vec3 = [number, number, number];
export type Mat3 = [Vec3, Vec3, Vec3]; // row-major

const DEG = Math.PI / 180;

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function normalize(a: Vec3): Vec3 {
  const n = Math.hypot(a[0], a[1], a[2]);
  return [a[0] / n, a[1] / n, a[2] / n];
}

export function orbitEye(params: OrbitParams): Vec3 {
  const az = params.azimuthDeg * DEG;
  const el = params.elevationDeg * DEG;
  const d = params.distance;
  return [
    params.target[0] + d * Math.cos(el) * Math.cos(az),
    params.target[1] + d * Math.cos(el) * Math.sin(az),
    params.target[2] + d * Math.sin(el),
  ];
}

/** World-to-camera rotation for the orbit pose. */
export function orbitRotation(params: OrbitParams): Mat3 {
  const eye = orbitEye(params);
  const forward = normalize(sub(params.target as Vec3, eye));
  const right = normalize(cross(forward, [0, 0, 1]));
  const down = cross(forward, right);
  return [right, down, forward];
}

export function worldToCamera(rotation: Mat3, eye: Vec3, p: Vec3): Vec3 {
  const d = sub(p, eye);
  return [
    rotation[0][0] * d[0] + rotation[0][1] * d[1] + rotation[0][2] * d[2],
    rotation[1][0] * d[0] + rotation[1][1] * d[1] + rotation[1][2] * d[2],
    rotation[2][0] * d[0] + rotation[2][1] * d[1] + rotation[2][2] * d[2],
  ];
}
