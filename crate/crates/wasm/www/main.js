// Demo driver: builds a key=value config from the sliders, calls the wasm
// entry points and draws on three canvases. No framework, no dependencies.
import init, { time_series_json, spectrum_json, regime_sweep_json } from "./pkg/qtel_wasm.js";

const $ = (id) => document.getElementById(id);
const sliders = ["dv", "w", "n", "tmax"];

function refreshOutputs() {
  for (const id of sliders) {
    $(`${id}-out`).value = $(id).value;
  }
}

function configText() {
  const n = Number($("n").value);
  // keep the sampling fine enough for fast Rabi cases but bounded for wasm
  const steps = 1600;
  return [
    `dV = ${$("dv").value}`,
    `W = ${$("w").value}`,
    `N = ${n}`,
    `t_max = ${$("tmax").value}`,
    `t_steps = ${steps}`,
  ].join("\n");
}

function clearCanvas(ctx) {
  ctx.save();
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.restore();
}

const MARGIN = { l: 55, r: 12, t: 10, b: 28 };

function frame(ctx, xlab, ylab) {
  const { width: W, height: H } = ctx.canvas;
  ctx.strokeStyle = "#8888";
  ctx.strokeRect(MARGIN.l, MARGIN.t, W - MARGIN.l - MARGIN.r, H - MARGIN.t - MARGIN.b);
  ctx.fillStyle = "#888";
  ctx.font = "11px system-ui";
  ctx.textAlign = "center";
  ctx.fillText(xlab, (MARGIN.l + W - MARGIN.r) / 2, H - 8);
  ctx.save();
  ctx.translate(13, (MARGIN.t + H - MARGIN.b) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylab, 0, 0);
  ctx.restore();
}

function scales(ctx, x0, x1, y0, y1) {
  const { width: W, height: H } = ctx.canvas;
  const sx = (x) => MARGIN.l + ((x - x0) / (x1 - x0)) * (W - MARGIN.l - MARGIN.r);
  const sy = (y) => H - MARGIN.b - ((y - y0) / (y1 - y0)) * (H - MARGIN.t - MARGIN.b);
  return [sx, sy];
}

function ticks(ctx, sx, sy, xs, ys, fmtX, fmtY) {
  ctx.fillStyle = "#888";
  ctx.font = "10px system-ui";
  ctx.textAlign = "center";
  const H = ctx.canvas.height;
  for (const x of xs) ctx.fillText(fmtX(x), sx(x), H - MARGIN.b + 13);
  ctx.textAlign = "right";
  for (const y of ys) ctx.fillText(fmtY(y), MARGIN.l - 4, sy(y) + 3);
}

function drawSeries(data) {
  const ctx = $("series").getContext("2d");
  clearCanvas(ctx);
  const tMax = data.times[data.times.length - 1];
  const [sx, sy] = scales(ctx, 0, tMax, 0, 1);
  frame(ctx, "t (s)", "occupation of side α");
  ticks(ctx, sx, sy, [0, tMax / 4, tMax / 2, (3 * tMax) / 4, tMax], [0, 0.5, 1],
    (x) => x.toFixed(0), (y) => y.toFixed(1));

  // hysteresis band of the detector actually used
  ctx.strokeStyle = "#88888866";
  ctx.setLineDash([4, 4]);
  for (const y of [data.lo, data.hi]) {
    ctx.beginPath();
    ctx.moveTo(sx(0), sy(y));
    ctx.lineTo(sx(tMax), sy(y));
    ctx.stroke();
  }
  ctx.setLineDash([]);

  ctx.strokeStyle = "#c33";
  ctx.lineWidth = 1.2;
  ctx.beginPath();
  data.times.forEach((t, i) => {
    const [x, y] = [sx(t), sy(data.occ_alpha[i])];
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  });
  ctx.stroke();

  // switch markers
  ctx.fillStyle = "#36c";
  for (const [t] of data.events) {
    ctx.beginPath();
    ctx.arc(sx(t), sy(0.5), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.lineWidth = 1;

  const dwell = data.mean_dwell ? `, mean dwell ${data.mean_dwell.toFixed(0)} s` : "";
  $("regime-label").textContent =
    `— regime: ${data.regime}, ${data.events.length} switches at ` +
    `${data.lo.toFixed(2)}/${data.hi.toFixed(2)}${dwell}`;
}

function drawSpectrum(data, nPerSide, dEps) {
  const ctx = $("spectrum").getContext("2d");
  clearCanvas(ctx);
  const band = ((nPerSide / 2) + 1) * dEps;
  const floor = 1e-12;
  const pts = data.energies
    .map((e, i) => ({ e, w: Math.max(data.weights[i], floor), b: data.branches[i] }))
    .filter((p) => Math.abs(p.e) <= band);
  if (pts.length === 0) return;
  const wMax = Math.max(...pts.map((p) => p.w));
  const [sx, sy] = scales(ctx, -band, band, Math.log10(floor), Math.log10(wMax) + 0.5);
  frame(ctx, "E (peV)", "log10 weight");
  ticks(ctx, sx, sy, [-band, 0, band], [-12, -8, -4, 0],
    (x) => x.toExponential(1), (y) => y.toFixed(0));

  for (const p of pts) {
    ctx.fillStyle = p.b === "minus" ? "#e80" : "#36c";
    ctx.fillRect(sx(p.e) - 1, sy(Math.log10(p.w)) - 1, 2.5, 2.5);
  }

  if (data.fit) {
    const { center, half_width, amplitude } = data.fit;
    ctx.strokeStyle = "#e8080088";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    const steps = 400;
    for (let i = 0; i <= steps; i++) {
      const e = -band + (2 * band * i) / steps;
      const dens = (amplitude * (half_width / Math.PI)) /
        ((e - center) ** 2 + half_width ** 2);
      const w = Math.max(dens * dEps, floor);
      const [x, y] = [sx(e), sy(Math.log10(w))];
      i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    }
    ctx.stroke();
    ctx.lineWidth = 1;
    $("fit-label").textContent =
      `— fit: center ${center.toExponential(2)} peV, HWHM ${half_width.toExponential(2)} peV ` +
      `(${(half_width / dEps).toFixed(2)} spacings)`;
  } else {
    $("fit-label").textContent = "— fit unavailable";
  }
}

function drawSweep(data, dEps) {
  const ctx = $("sweep").getContext("2d");
  clearCanvas(ctx);
  const xs = data.dv;
  const ws = data.fit_half_width.map((w) => (Number.isFinite(w) ? w / dEps : NaN));
  const finite = ws.filter(Number.isFinite);
  if (finite.length === 0) return;
  const lo = Math.log10(Math.min(...finite)) - 0.3;
  const hi = Math.log10(Math.max(...finite)) + 0.3;
  const [sx, sy] = scales(ctx, Math.min(...xs), Math.max(...xs), lo, hi);
  frame(ctx, "dV (peV)", "log10 HWHM / spacing");

  const colors = { SlowRabi: "#36c3", FasterRabi: "#3a63", Telegraph: "#e803", Bonding: "#8363" };
  for (let i = 0; i < xs.length; i++) {
    const x0 = i === 0 ? sx(xs[0]) : (sx(xs[i - 1]) + sx(xs[i])) / 2;
    const x1 = i === xs.length - 1 ? sx(xs[i]) : (sx(xs[i]) + sx(xs[i + 1])) / 2;
    ctx.fillStyle = colors[data.regime[i]] ?? "#8882";
    ctx.fillRect(Math.min(x0, x1), MARGIN.t, Math.abs(x1 - x0), ctx.canvas.height - MARGIN.t - MARGIN.b);
  }
  ticks(ctx, sx, sy, xs, [Math.ceil(lo), 0, Math.floor(hi)],
    (x) => x.toFixed(3), (y) => y.toFixed(0));

  ctx.strokeStyle = "#c33";
  ctx.beginPath();
  let started = false;
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(ws[i])) continue;
    const [x, y] = [sx(xs[i]), sy(Math.log10(ws[i]))];
    started ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
    started = true;
  }
  ctx.stroke();

  ctx.fillStyle = "#888";
  ctx.font = "11px system-ui";
  ctx.textAlign = "center";
  const seen = new Set();
  for (let i = 0; i < xs.length; i++) {
    if (seen.has(data.regime[i])) continue;
    seen.add(data.regime[i]);
    ctx.fillText(data.regime[i], sx(xs[i]), MARGIN.t + 14);
  }
}

async function run() {
  const status = $("status");
  status.textContent = "computing…";
  // let the status paint before the wasm call blocks the main thread
  await new Promise((r) => setTimeout(r, 20));
  const cfg = configText();
  const dEps = 2.22e-6;
  const n = Number($("n").value);
  try {
    const t0 = performance.now();
    drawSeries(JSON.parse(time_series_json(cfg)));
    drawSpectrum(JSON.parse(spectrum_json(cfg)), n, dEps);
    const v = 0.05;
    const dvs = [];
    for (let i = 0; i <= 10; i++) dvs.push((v * (0.5 + 9.5 * i)) / 100);
    drawSweep(JSON.parse(regime_sweep_json(cfg, dvs.join(","))), dEps);
    status.textContent = `done in ${((performance.now() - t0) / 1000).toFixed(1)} s`;
  } catch (e) {
    status.textContent = `error: ${e}`;
  }
}

await init();
refreshOutputs();
for (const id of sliders) $(id).addEventListener("input", refreshOutputs);
for (const btn of document.querySelectorAll("button.preset")) {
  btn.addEventListener("click", () => {
    $("dv").value = btn.dataset.dv;
    refreshOutputs();
    run();
  });
}
$("run").addEventListener("click", run);
run();
