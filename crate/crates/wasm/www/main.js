import init, { nstar_demo, risk_demo, allocation_demo } from "./pkg/isocorr_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function call(fn, outId) {
  const res = JSON.parse(fn());
  const out = $(outId);
  if (res.error) {
    out.textContent = res.error;
    out.className = "out err";
    return null;
  }
  out.className = "out";
  return res;
}

// series: [{ points: [[x, y]], color, dots, label }]
function plot(canvas, series, { logx = false } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 44;
  ctx.clearRect(0, 0, W, H);
  const tx = (x) => (logx ? Math.log10(x) : x);
  const all = series.flatMap((s) => s.points).filter(([x, y]) => Number.isFinite(tx(x)) && Number.isFinite(y));
  if (!all.length) return;
  let [x0, x1] = [Math.min(...all.map((p) => tx(p[0]))), Math.max(...all.map((p) => tx(p[0])))];
  let [y0, y1] = [Math.min(0, ...all.map((p) => p[1])), Math.max(...all.map((p) => p[1]))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const sx = (x) => pad + ((tx(x) - x0) / (x1 - x0)) * (W - 2 * pad);
  const sy = (y) => H - pad + ((y0 - y) / (y1 - y0)) * (H - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const y = y0 + ((y1 - y0) * i) / 4;
    ctx.fillText(y.toPrecision(3), 2, sy(y) + 4);
    const xv = x0 + ((x1 - x0) * i) / 4;
    const label = logx ? (10 ** xv).toPrecision(2) : xv.toFixed(0);
    ctx.fillText(label, pad + ((W - 2 * pad) * i) / 4 - 10, H - pad + 14);
  }
  series.forEach((s, k) => {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      for (const [x, y] of s.points) ctx.fillRect(sx(x) - 1.5, sy(y) - 1.5, 3, 3);
    } else {
      ctx.beginPath();
      s.points.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
      ctx.stroke();
    }
    ctx.fillText(s.label, W - pad - 150, pad + 14 + 14 * k);
  });
}

function runNstar() {
  const d = call(() => nstar_demo(num("ns-n"), num("ns-rho"), num("ns-t"), num("ns-trials"), num("ns-seed")), "ns-out");
  if (!d) return;
  plot($("ns-plot"), [
    { points: d.scatter, color: "#3a7", dots: true, label: "simulated trials" },
    { points: d.n.map((n, i) => [n, d.iso[i]]), color: "#c33", label: "N / (1 + (N-1) rho)" },
  ]);
  $("ns-out").textContent =
    `${d.scatter.length} trials, asymptote 1/rho = ${d.asymptote?.toFixed(3) ?? "none"}, ` +
    `N*(${d.n.length}) = ${d.iso.at(-1).toFixed(3)}`;
}

function runRisk() {
  const rho = num("rk-rho");
  $("rk-rho-val").textContent = rho.toFixed(3);
  const d = call(() => risk_demo(rho, num("rk-n")), "rk-out");
  if (!d) return;
  plot($("rk-plot"), [
    { points: d.n.map((n, i) => [n, d.ratio[i] ?? NaN]), color: "#36c", label: "V_R / V_S" },
    { points: d.n.map((n, i) => [n, d.centering[i]]), color: "#c63", label: "centering factor" },
  ]);
  const r = d.ratio.at(-1);
  $("rk-out").textContent =
    `V_R/V_S at N=${d.n.length}: ${r === null ? "undefined" : r.toFixed(4)}; ` +
    `limit (1-rho)/rho = ${d.asymptotic_ratio?.toFixed(4) ?? "undefined"}`;
}

function runAlloc() {
  const d = call(() => allocation_demo($("al-alpha").value, num("al-rho"), num("al-lambda")), "al-out");
  if (!d) return;
  const idx = d.alpha.map((_, i) => i + 1);
  plot($("al-plot"), [
    { points: idx.map((i) => [i, d.alpha[i - 1]]), color: "#888", dots: true, label: "alpha" },
    { points: idx.map((i) => [i, d.mvo[i - 1]]), color: "#36c", label: "mean-variance" },
    { points: idx.map((i) => [i, d.laplace[i - 1]]), color: "#c33", label: "Laplace" },
  ]);
  plot($("al-omega"), [
    { points: d.omega_curve, color: "#639", label: "Omega(z^2)" },
    { points: [[d.z_sq, d.omega]], color: "#000", dots: true, label: "current portfolio" },
  ], { logx: true });
  $("al-out").textContent =
    `z^2 = ${d.z_sq.toPrecision(4)}, Omega = ${d.omega.toPrecision(4)}, centering = ${d.centering.toPrecision(4)}`;
}

await init();
$("ns-run").addEventListener("click", runNstar);
$("rk-rho").addEventListener("input", runRisk);
$("rk-n").addEventListener("change", runRisk);
for (const id of ["al-alpha", "al-rho", "al-lambda"]) $(id).addEventListener("change", runAlloc);
runNstar();
runRisk();
runAlloc();
