import init, { couplingProfile, truncationCurve, instantTrace } from "./pkg/cdising_wasm.js";

const $ = (id) => document.getElementById(id);

function plot(canvas, series, { xLabel, yLabel }) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 48;
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.x), ys = series.flatMap((s) => s.y);
  let [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 - y0 < 1e-9) { y0 -= 0.5e-3; y1 += 0.5e-3; }
  const px = (x) => pad + (x - x0) / (x1 - x0) * (w - 1.5 * pad);
  const py = (y) => h - pad + (y0 - y) / (y1 - y0) * (h - 1.5 * pad);

  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  ctx.fillText(xLabel, w / 2, h - 12);
  ctx.fillText(yLabel, 4, 14);
  ctx.fillText(y1.toPrecision(4), 4, py(y1) + 4);
  ctx.fillText(y0.toPrecision(4), 4, py(y0));
  ctx.fillText(String(+x0.toPrecision(4)), px(x0) - 8, h - pad + 16);
  ctx.fillText(String(+x1.toPrecision(4)), px(x1) - 8, h - pad + 16);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    s.x.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.y[i])) : ctx.moveTo(px(x), py(s.y[i]))));
    ctx.stroke();
  }
}

function evenN(id) {
  const n = Math.max(2, Math.round(Number($(id).value) / 2) * 2);
  $(id).value = n;
  return n;
}

function drawProfile() {
  const n = evenN("cp-n");
  const g = Number($("cp-g").value);
  $("cp-g-val").textContent = g.toFixed(3);
  const flat = couplingProfile(n, g);
  const half = flat.length / 2;
  const m = Array.from({ length: half }, (_, i) => i + 1);
  plot($("cp-plot"), [
    { x: m, y: Array.from(flat.slice(0, half)), color: "#1f6fb4" },
    { x: m, y: Array.from(flat.slice(half)), color: "#d9641e" },
  ], { xLabel: "range m", yLabel: "h_m" });
}

function busy(statusId, work) {
  $(statusId).textContent = "running...";
  $(statusId).className = "";
  setTimeout(() => {
    const start = performance.now();
    try {
      work();
      $(statusId).textContent = `${((performance.now() - start) / 1000).toFixed(2)} s`;
    } catch (err) {
      $(statusId).textContent = String(err);
      $(statusId).className = "error";
    }
  }, 20);
}

function runTruncation() {
  busy("tc-status", () => {
    const n = evenN("tc-n");
    const p = Array.from(truncationCurve(n, Number($("tc-t").value), 5, 0));
    plot($("tc-plot"), [{ x: p.map((_, m) => m), y: p, color: "#1f6fb4" }],
      { xLabel: "truncation range M", yLabel: "p_GS" });
  });
}

function runTrace() {
  busy("tr-status", () => {
    const n = evenN("tr-n");
    const flat = instantTrace(n, Number($("tr-t").value), 5, 0, $("tr-c").value, 400);
    const g = [], p = [];
    for (let i = 0; i < flat.length; i += 2) { g.push(flat[i]); p.push(flat[i + 1]); }
    plot($("tr-plot"), [{ x: g, y: p, color: "#2a9d5c" }],
      { xLabel: "field g (ramp runs right to left)", yLabel: "p_instant" });
  });
}

await init();
$("cp-g").addEventListener("input", drawProfile);
$("cp-n").addEventListener("change", drawProfile);
$("tc-run").addEventListener("click", runTruncation);
$("tr-run").addEventListener("click", runTrace);
drawProfile();
