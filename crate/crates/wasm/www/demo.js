import init, { qcb_vs_copies, roc_optimal, roc_homodyne } from "./pkg/qibench_wasm.js";

const COLORS = ["#d62728", "#ff7f0e", "#bcbd22", "#2ca02c", "#17becf", "#1f77b4"];
const SLIDERS = ["n_s", "n_a", "eta", "copies"];

let view = "chernoff";

// sliders hold log10 values; N_A also allows exactly zero at the left end
function value(id) {
  const x = Number(document.getElementById(id).value);
  if (id === "n_a" && x === 0) return 0;
  return 10 ** x;
}

function label(x) {
  return x === 0 ? "0" : x.toPrecision(3);
}

function compute() {
  const [n_s, n_a, eta, copies] = SLIDERS.map(value);
  switch (view) {
    case "chernoff":
      return { data: JSON.parse(qcb_vs_copies(n_s, n_a, eta, 8)), xlabel: "log10 M", ylabel: "log10 P_err bound", logx: true };
    case "optimal":
      return { data: JSON.parse(roc_optimal(n_s, n_a, eta, copies)), xlabel: "log10 P_fa", ylabel: "log10 P_md", logx: true };
    default:
      return { data: JSON.parse(roc_homodyne(n_s, n_a, eta, copies)), xlabel: "log10 P_fa", ylabel: "log10 P_md", logx: true };
  }
}

function niceTicks(lo, hi, n) {
  const span = hi - lo || 1;
  const raw = span / n;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= raw);
  const out = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12; t += step) out.push(t);
  return out;
}

function draw({ data, xlabel, ylabel, logx }) {
  const canvas = document.getElementById("plot");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = { l: 70, r: 150, t: 20, b: 50 };
  ctx.clearRect(0, 0, w, h);

  const xs = data.x.map((x) => (logx ? Math.log10(x) : x));
  const ys = data.series.flatMap((s) => s.y).filter(Number.isFinite);
  let [ylo, yhi] = [Math.min(...ys), Math.max(...ys)];
  if (ylo === yhi) [ylo, yhi] = [ylo - 1, yhi + 1];
  const [xlo, xhi] = [Math.min(...xs), Math.max(...xs)];
  const px = (x) => pad.l + ((x - xlo) / (xhi - xlo || 1)) * (w - pad.l - pad.r);
  const py = (y) => h - pad.b - ((y - ylo) / (yhi - ylo)) * (h - pad.t - pad.b);

  ctx.strokeStyle = "#ddd";
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  for (const t of niceTicks(xlo, xhi, 8)) {
    ctx.beginPath(); ctx.moveTo(px(t), pad.t); ctx.lineTo(px(t), h - pad.b); ctx.stroke();
    ctx.fillText(t.toPrecision(3).replace(/\.?0+$/, ""), px(t) - 10, h - pad.b + 16);
  }
  for (const t of niceTicks(ylo, yhi, 6)) {
    ctx.beginPath(); ctx.moveTo(pad.l, py(t)); ctx.lineTo(w - pad.r, py(t)); ctx.stroke();
    ctx.fillText(Number(t.toPrecision(4)).toString(), 8, py(t) + 4);
  }
  ctx.fillText(xlabel, (pad.l + w - pad.r) / 2 - 30, h - 12);
  ctx.save(); ctx.translate(16, h / 2); ctx.rotate(-Math.PI / 2); ctx.fillText(ylabel, -50, 0); ctx.restore();

  data.series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = s.id === "amp" ? 3 : 1.6;
    ctx.setLineDash(s.id === "opt" ? [6, 4] : []);
    ctx.beginPath();
    let started = false;
    s.y.forEach((y, k) => {
      if (!Number.isFinite(y)) { started = false; return; }
      started ? ctx.lineTo(px(xs[k]), py(y)) : ctx.moveTo(px(xs[k]), py(y));
      started = true;
    });
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillRect(w - pad.r + 16, pad.t + 10 + 20 * i, 14, 3);
    ctx.fillStyle = "#222";
    ctx.fillText(s.id, w - pad.r + 36, pad.t + 15 + 20 * i);
  });
}

function refresh() {
  for (const id of SLIDERS) {
    document.querySelector(`output[for=${id}]`).textContent = label(value(id));
  }
  document.getElementById("copies").disabled = view === "chernoff";
  const err = document.getElementById("error");
  try {
    draw(compute());
    err.textContent = "";
  } catch (e) {
    err.textContent = String(e.message ?? e);
  }
}

await init();
for (const id of SLIDERS) document.getElementById(id).addEventListener("input", refresh);
for (const b of document.querySelectorAll("nav button")) {
  b.addEventListener("click", () => {
    view = b.dataset.view;
    document.querySelectorAll("nav button").forEach((o) => o.classList.toggle("active", o === b));
    refresh();
  });
}
refresh();
