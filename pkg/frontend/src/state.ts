/** Viewer state and its invariant-preserving transitions.
 *
 * Invariants maintained by every transition: slider pairs respect
 * pos <= neg (clamped live, matching the service), and at most one poche
 * toggle is active at a time (activating one releases the previous).
 */

import { Mode, PLANE_TOKENS, PlaneToken, splitToken } from "./types";

export interface SliderState {
  offset: number;
  active: boolean;
}

export interface Selection {
  element: string;
  layer: number | null;
}

export interface OrbitParams {
  target: [number, number, number];
  distance: number;
  azimuthDeg: number;
  elevationDeg: number;
}

export interface ViewerState {
  mode: Mode;
  sliders: Record<PlaneToken, SliderState>;
  pocheToggle: PlaneToken | null;
  selected: Selection | null;
  orbit: OrbitParams;
}

export function initialState(aabbMin: number[], aabbMax: number[]): ViewerState {
  const sliders = {} as Record<PlaneToken, SliderState>;
  for (const token of PLANE_TOKENS) {
    const [axis, sign] = splitToken(token);
    const k = { x: 0, y: 1, z: 2 }[axis];
    sliders[token] = {
      offset: sign === "pos" ? aabbMin[k] : aabbMax[k],
      active: false,
    };
  }
  const center: [number, number, number] = [
    (aabbMin[0] + aabbMax[0]) / 2,
    (aabbMin[1] + aabbMax[1]) / 2,
    (aabbMin[2] + aabbMax[2]) / 2,
  ];
  const diag = Math.hypot(
    aabbMax[0] - aabbMin[0], aabbMax[1] - aabbMin[1], aabbMax[2] - aabbMin[2]);
  return {
    mode: "section",
    sliders,
    pocheToggle: null,
    selected: null,
    orbit: { target: center, distance: diag * 1.8, azimuthDeg: 35, elevationDeg: 25 },
  };
}

function paired(token: PlaneToken): PlaneToken {
  const [axis, sign] = splitToken(token);
  return `${axis}-${sign === "pos" ? "neg" : "pos"}` as PlaneToken;
}

/** Move one slider; the pos <= neg pair invariant clamps the value live. */
export function setSlider(state: ViewerState, token: PlaneToken,
                          offset: number, active?: boolean): ViewerState {
  const [, sign] = splitToken(token);
  const pair = state.sliders[paired(token)];
  const clamped = sign === "pos"
    ? Math.min(offset, pair.offset)
    : Math.max(offset, pair.offset);
  const sliders = { ...state.sliders };
  sliders[token] = {
    offset: clamped,
    active: active ?? state.sliders[token].active,
  };
  return { ...state, sliders };
}

/** Activate one poche toggle (releasing any other) or clear with null. */
export function setPocheToggle(state: ViewerState,
                               token: PlaneToken | null): ViewerState {
  return { ...state, pocheToggle: token };
}

export function activeToggleCount(state: ViewerState): number {
  return state.pocheToggle === null ? 0 : 1;
}

export function setMode(state: ViewerState, mode: Mode): ViewerState {
  return { ...state, mode };
}

export function select(state: ViewerState, selection: Selection | null): ViewerState {
  return { ...state, selected: selection };
}

export function orbitBy(state: ViewerState, dAzimuthDeg: number,
                        dElevationDeg: number): ViewerState {
  const orbit = { ...state.orbit };
  orbit.azimuthDeg = (orbit.azimuthDeg + dAzimuthDeg) % 360;
  orbit.elevationDeg = Math.max(-89, Math.min(89, orbit.elevationDeg + dElevationDeg));
  return { ...state, orbit };
}

/** The /section request body for the current state. */
export function sectionBody(state: ViewerState): object {
  const planes = PLANE_TOKENS.map((token) => {
    const [axis, sign] = splitToken(token);
    return {
      axis,
      sign,
      offset: state.sliders[token].offset,
      active: state.sliders[token].active,
    };
  });
  return { planes, mode: state.mode };
}

export function invariantsHold(state: ViewerState): boolean {
  for (const axis of ["x", "y", "z"] as const) {
    if (state.sliders[`${axis}-pos`].offset >
        state.sliders[`${axis}-neg`].offset) {
      return false;
    }
  }
  return activeToggleCount(state) <= 1;
}
