import init, { powerCurve, beamCut, DeskDrop } from "./pkg/fpcsim_wasm.js";

const $ = (id) => document.getElementById(id);

// Line plot with linear axes. series: [{ xs, ys, color, label }]
function plot(canvas, series, { xlabel, ylabel, xmin, xmax, ymin, ymax }) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 45;
  ctx.clearRect(0, 0, w, h);
  const sx = (x) => pad + ((x - xmin) / (xmax - xmin)) * (w - 2 * pad);
  const sy = (y) => h - pad + ((ymin - y) / (ymax - ymin)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  for (let i = 0; i <= 5; i++) {
    const x = xmin + ((xmax - xmin) * i) / 5, y = ymin + ((ymax - ymin) * i) / 5;
    ctx.fillText(x.toFixed(1), sx(x) - 10, h - pad + 14);
    ctx.fillText(y.toFixed(1), 4, sy(y) + 4);
  }
  ctx.fillText(xlabel, w / 2 - 20, h - 8);
  ctx.fillText(ylabel, pad, pad - 8);
  series.forEach((s, k) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.xs.forEach((x, i) => {
      const y = Math.min(ymax, Math.max(ymin, s.ys[i]));
      i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y));
    });
    ctx.stroke();
    if (s.label) {
      ctx.fillStyle = s.color;
      ctx.fillText(s.label, w - pad - 120, pad + 16 + 14 * k);
    }
  });
}

function drawPower() {
  const p0 = +$("pc-p0").value, alpha = +$("pc-alpha").value, n = +$("pc-n").value;
  $("pc-p0-v").textContent = p0;
  $("pc-alpha-v").textContent = alpha.toFixed(2);
  const pts = 121, lmin = 60, lmax = 180;
  const ys = Array.from(powerCurve(p0, alpha, n, lmin, lmax, pts));
  const xs = ys.map((_, i) => lmin + ((lmax - lmin) * i) / (pts - 1));
  plot($("pc-plot"), [{ xs, ys, color: "#c33", label: "P_k" }], {
    xlabel: "attenuation L (dB)", ylabel: "pilot power (dBm)", xmin: lmin, xmax: lmax, ymin: -40, ymax: 25,
  });
}

function drawBeam() {
  const m = +$("bm-m").value, az = +$("bm-az").value;
  $("bm-az-v").textContent = az;
  const pts = 721;
  const ys = Array.from(beamCut(m, az, pts));
  const xs = ys.map((_, i) => -180 + (360 * i) / (pts - 1));
  plot($("bm-plot"), [{ xs, ys, color: "#36c", label: `${m} ports` }], {
    xlabel: "azimuth (deg)", ylabel: "gain (dBi)", xmin: -180, xmax: 180, ymin: -40, ymax: 35,
  });
}

const palette = ["#c33", "#36c", "#393", "#c93", "#939", "#399", "#666"];

function drawMap(drop) {
  const canvas = $("dr-map"), ctx = canvas.getContext("2d");
  const w = canvas.width, isd = drop.isd();
  const span = 2.4 * isd, scale = w / (2 * span);
  const tx = (x) => w / 2 + x * scale, ty = (y) => w / 2 - y * scale;
  ctx.clearRect(0, 0, w, w);
  const users = drop.users(), anchors = drop.anchors(), power = drop.pilotPower(1);
  for (let i = 0; i < anchors.length; i++) {
    // Darker dots transmit more pilot power under FPC.
    const shade = Math.round(200 - 180 * Math.max(0, Math.min(1, (power[i] + 30) / 53)));
    ctx.fillStyle = `rgb(${shade},${shade},${shade})`;
    ctx.beginPath();
    ctx.arc(tx(users[2 * i]), ty(users[2 * i + 1]), 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  const sites = drop.sites(), orient = drop.orientations();
  for (let s = 0; s < sites.length / 2; s++) {
    const x = tx(sites[2 * s]), y = ty(sites[2 * s + 1]);
    for (let k = 0; k < 3; k++) {
      const a = (orient[3 * s + k] * Math.PI) / 180;
      ctx.strokeStyle = palette[k];
      ctx.beginPath();
      ctx.moveTo(x, y);
      ctx.lineTo(x + 18 * Math.cos(a), y - 18 * Math.sin(a));
      ctx.stroke();
    }
    ctx.fillStyle = "#000";
    ctx.fillRect(x - 3, y - 3, 6, 6);
  }
}

function runDrop() {
  $("dr-summary").textContent = "running...";
  // Let the status text paint before the synchronous simulation starts.
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const drop = new DeskDrop(+$("dr-seed").value, +$("dr-drops").value, +$("dr-p0").value, +$("dr-alpha").value,
        $("dr-reuse").value, $("dr-bf").value);
      const ms = performance.now() - t0;
      $("dr-summary").textContent =
        `noPC: CSE ${drop.cse(0).toFixed(2)} bit/s/Hz, CBT ${drop.cbt(0).toFixed(3)} Mbit/s | ` +
        `FPC: CSE ${drop.cse(1).toFixed(2)} bit/s/Hz, CBT ${drop.cbt(1).toFixed(3)} Mbit/s (${ms.toFixed(0)} ms)`;
      drawMap(drop);
      const cdf = (v) => ({ xs: Array.from(v), ys: Array.from(v, (_, i) => (i + 1) / v.length) });
      const a = cdf(drop.throughput(0)), b = cdf(drop.throughput(1));
      const xmax = Math.max(a.xs[a.xs.length - 1], b.xs[b.xs.length - 1]);
      plot($("dr-cdf"), [{ ...a, color: "#333", label: "noPC" }, { ...b, color: "#c33", label: "FPC" }], {
        xlabel: "user throughput (Mbit/s)", ylabel: "CDF", xmin: 0, xmax, ymin: 0, ymax: 1,
      });
      drop.free();
    } catch (e) {
      $("dr-summary").textContent = `error: ${e.message ?? e}`;
    }
  }, 10);
}

await init();
$("status").textContent = "";
for (const id of ["pc-p0", "pc-alpha", "pc-n"]) $(id).addEventListener("input", drawPower);
for (const id of ["bm-m", "bm-az"]) $(id).addEventListener("input", drawBeam);
$("dr-run").addEventListener("click", runDrop);
drawPower();
drawBeam();
runDrop();
