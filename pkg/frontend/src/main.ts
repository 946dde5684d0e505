/** Browser entry point: wires the DOM, the service client, and the scene. */

import * as THREE from "three";

import { ApiClient } from "./api";
import { LatestWins } from "./coalesce";
import { gizmoScreenVectors } from "./gizmo";
import { buildPanelRows } from "./metadata";
import { orbitRotation } from "./orbit";
import { syncScene } from "./render";
import {
  ViewerState, initialState, orbitBy, sectionBody, select, setMode,
  setPocheToggle, setSlider,
} from "./state";
import {
  Mode, ModelSummary, PLANE_TOKENS, PickResponse, PlaneToken,
  SectionResponse, splitToken,
} from "./types";

const api = new ApiClient();

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function showBanner(message: string): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message;
  banner.style.display = "block";
  window.setTimeout(() => { banner.style.display = "none"; }, 4000);
}

async function boot(): Promise<void> {
  const model: ModelSummary = await api.model();
  let state: ViewerState = initialState(model.aabb.min, model.aabb.max);

  const canvas = el<HTMLCanvasElement>("scene");
  const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0x1d2126);
  scene.add(new THREE.AmbientLight(0xffffff, 0.55));
  const sun = new THREE.DirectionalLight(0xffffff, 1.1);
  sun.position.set(4, -6, 8);
  scene.add(sun);

  const camera = new THREE.PerspectiveCamera(50, 1, 0.01, 1000);
  camera.up.set(0, 0, 1);

  function applyCamera(): void {
    const az = (state.orbit.azimuthDeg * Math.PI) / 180;
    const elv = (state.orbit.elevationDeg * Math.PI) / 180;
    const [tx, ty, tz] = state.orbit.target;
    const d = state.orbit.distance;
    camera.position.set(
      tx + d * Math.cos(elv) * Math.cos(az),
      ty + d * Math.cos(elv) * Math.sin(az),
      tz + d * Math.sin(elv));
    camera.lookAt(tx, ty, tz);
  }

  function resize(): void {
    const w = canvas.clientWidth;
    const h = canvas.clientHeight;
    renderer.setSize(w, h, false);
    camera.aspect = w / h;
    camera.updateProjectionMatrix();
  }
  window.addEventListener("resize", resize);

  const gizmoCanvas = el<HTMLCanvasElement>("gizmo");
  function drawPivot(): void {
    const ctx = gizmoCanvas.getContext("2d")!;
    const size = gizmoCanvas.width;
    ctx.clearRect(0, 0, size, size);
    const c = size / 2;
    const r = size * 0.38;
    const vectors = gizmoScreenVectors(orbitRotation(state.orbit));
    const colors = ["#e05555", "#62c462", "#5b9bd5"];
    const names = ["X", "Y", "Z"];
    vectors.forEach((v, k) => {
      ctx.strokeStyle = colors[k];
      ctx.fillStyle = colors[k];
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(c, c);
      ctx.lineTo(c + v[0] * r, c - v[1] * r);
      ctx.stroke();
      ctx.fillText(names[k], c + v[0] * (r + 8) - 3, c - v[1] * (r + 8) + 3);
    });
  }

  const coalescer = new LatestWins<object, SectionResponse>(
    (body) => api.section(body),
    (response) => {
      try {
        syncScene(scene, response);
      } catch (error) {
        showBanner(`malformed geometry batch: ${error}`);
      }
    },
    (error) => showBanner(`section request failed: ${error}`),
  );

  function requestSection(): void {
    coalescer.request(sectionBody(state));
  }

  // sliders: three pairs, bottom-left
  const slidersBox = el<HTMLDivElement>("sliders");
  for (const token of PLANE_TOKENS) {
    const [axis, sign] = splitToken(token);
    const k = { x: 0, y: 1, z: 2 }[axis];
    const row = document.createElement("div");
    row.className = "slider-row";
    const label = document.createElement("label");
    label.textContent = `${axis.toUpperCase()}-${sign === "pos" ? "Pos" : "Neg"}`;
    const active = document.createElement("input");
    active.type = "checkbox";
    active.title = "activate plane";
    const range = document.createElement("input");
    range.type = "range";
    const span = model.aabb.max[k] - model.aabb.min[k];
    range.min = String(model.aabb.min[k] - 0.05 * span);
    range.max = String(model.aabb.max[k] + 0.05 * span);
    range.step = String(span / 200);
    range.value = String(state.sliders[token].offset);
    const update = () => {
      state = setSlider(state, token, Number(range.value), active.checked);
      range.value = String(state.sliders[token].offset); // reflect live clamp
      requestSection();
    };
    range.addEventListener("input", update);
    active.addEventListener("change", update);
    row.append(label, active, range);
    slidersBox.append(row);
  }

  // poche toggles: one per plane, mutually exclusive
  const togglesBox = el<HTMLDivElement>("toggles");
  const toggleInputs = new Map<PlaneToken, HTMLInputElement>();
  for (const token of PLANE_TOKENS) {
    const wrap = document.createElement("label");
    wrap.className = "toggle";
    const input = document.createElement("input");
    input.type = "checkbox";
    input.addEventListener("change", () => {
      const next: PlaneToken | null = input.checked ? token : null;
      state = setPocheToggle(state, next);
      for (const [other, box] of toggleInputs) {
        box.checked = other === state.pocheToggle;
      }
    });
    toggleInputs.set(token, input);
    wrap.append(input, document.createTextNode(token));
    togglesBox.append(wrap);
  }

  el<HTMLSelectElement>("mode").addEventListener("change", (event) => {
    state = setMode(state, (event.target as HTMLSelectElement).value as Mode);
    requestSection();
  });

  // click to pick: unproject through the rendering camera, ask the service
  const panel = el<HTMLDivElement>("panel");
  const raycaster = new THREE.Raycaster();
  canvas.addEventListener("click", async (event) => {
    const rect = canvas.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((event.clientX - rect.left) / rect.width) * 2 - 1,
      -((event.clientY - rect.top) / rect.height) * 2 + 1);
    raycaster.setFromCamera(ndc, camera);
    const o = raycaster.ray.origin;
    const d = raycaster.ray.direction.normalize();
    try {
      const pick: PickResponse = await api.pick(
        [o.x, o.y, o.z], [d.x, d.y, d.z], state.pocheToggle);
      if (pick.hit === null) {
        state = select(state, null);
        panel.innerHTML = "";
        requestSection();
        return;
      }
      state = select(state, { element: pick.hit.element,
                              layer: pick.is_poche ? pick.hit.layer : null });
      panel.innerHTML = "";
      for (const row of buildPanelRows(pick, model)) {
        const div = document.createElement("div");
        div.className = "panel-row";
        div.innerHTML = `<span>${row.label}</span><b>${row.value}</b>`;
        panel.append(div);
      }
      // re-request with the highlight applied server-side
      const body = sectionBody(state) as Record<string, unknown>;
      body.highlight = { element: pick.hit.element,
                         layer: pick.is_poche ? pick.hit.layer : null };
      coalescer.request(body);
    } catch (error) {
      showBanner(`pick failed: ${error}`);
    }
  });

  // orbit with pointer drag
  let dragging = false;
  let last: [number, number] = [0, 0];
  canvas.addEventListener("pointerdown", (e) => {
    dragging = true;
    last = [e.clientX, e.clientY];
  });
  window.addEventListener("pointerup", () => { dragging = false; });
  window.addEventListener("pointermove", (e) => {
    if (!dragging) return;
    state = orbitBy(state, -(e.clientX - last[0]) * 0.4,
                    (e.clientY - last[1]) * 0.3);
    last = [e.clientX, e.clientY];
  });
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    state = { ...state,
              orbit: { ...state.orbit,
                       distance: state.orbit.distance * (e.deltaY > 0 ? 1.1 : 0.9) } };
  });

  function frame(): void {
    resize();
    applyCamera();
    drawPivot();
    renderer.render(scene, camera);
    requestAnimationFrame(frame);
  }

  requestSection();
  frame();
}

boot().catch((error) => {
  showBanner(`failed to load model: ${error}`);
});
