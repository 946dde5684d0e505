import { describe, expect, it } from "vitest";

import { angleDiffDeg, gizmoScreenVectors, pivotAxes, screenAngleDeg }
  from "../src/gizmo";
import { orbitRotation } from "../src/orbit";
import { OrbitParams } from "../src/state";

function orbit(azimuthDeg: number, elevationDeg: number): OrbitParams {
  return { target: [0, 0, 0], distance: 5, azimuthDeg, elevationDeg };
}

describe("pivot gizmo", () => {
  it("returns orthonormal axes for any orbit pose", () => {
    for (let az = 0; az < 360; az += 17) {
      for (const elv of [-60, -10, 25, 70]) {
        const axes = pivotAxes(orbitRotation(orbit(az, elv)));
        for (let i = 0; i < 3; i++) {
          const len = Math.hypot(...axes[i]);
          expect(Math.abs(len - 1)).toBeLessThan(1e-12);
          for (let j = i + 1; j < 3; j++) {
            const dot = axes[i][0] * axes[j][0] + axes[i][1] * axes[j][1]
              + axes[i][2] * axes[j][2];
            expect(Math.abs(dot)).toBeLessThan(1e-12);
          }
        }
      }
    }
  });

  it("keeps the world Z axis pointing up on screen while orbiting", () => {
    for (let az = 0; az < 360; az += 5) {
      const [, , zAxis] = gizmoScreenVectors(orbitRotation(orbit(az, 30)));
      expect(angleDiffDeg(screenAngleDeg(zAxis), 90)).toBeLessThan(1e-9);
    }
  });

  it("tracks a scripted 360-degree orbit within 1 degree", () => {
    // near-top-down orbit: the world X axis on screen must counter-rotate
    // with the azimuth, step for step
    const elevation = 85;
    const start = screenAngleDeg(
      gizmoScreenVectors(orbitRotation(orbit(0, elevation)))[0]);
    for (let az = 0; az <= 360; az += 5) {
      const [xAxis] = gizmoScreenVectors(orbitRotation(orbit(az, elevation)));
      const expected = start - az;
      expect(angleDiffDeg(screenAngleDeg(xAxis), expected)).toBeLessThan(1.0);
    }
  });

  it("accumulates a full revolution over a full orbit", () => {
    const elevation = 85;
    let previous = screenAngleDeg(
      gizmoScreenVectors(orbitRotation(orbit(0, elevation)))[0]);
    let accumulated = 0;
    for (let az = 5; az <= 360; az += 5) {
      const angle = screenAngleDeg(
        gizmoScreenVectors(orbitRotation(orbit(az, elevation)))[0]);
      let step = angle - previous;
      while (step > 180) step -= 360;
      while (step < -180) step += 360;
      accumulated += step;
      previous = angle;
    }
    expect(Math.abs(accumulated + 360)).toBeLessThan(1.0);
  });
});
