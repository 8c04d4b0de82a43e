import init, { bound_curve, orbit_ball, Level } from "./pkg/hyperbergman_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function report(id, fn) {
  const out = $(id);
  out.classList.remove("err");
  try {
    out.textContent = fn();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
}

// blue -> yellow ramp on t in [0, 1]
function ramp(t) {
  const c = Math.max(0, Math.min(1, t));
  return [Math.round(255 * c), Math.round(60 + 160 * c), Math.round(200 * (1 - c))];
}

function plotCurve() {
  report("curve-out", () => {
    const pts = JSON.parse(bound_curve(num("rmin"), num("rmax"), 200));
    const cv = $("curve"), ctx = cv.getContext("2d");
    const logs = pts.map(([, b]) => Math.log10(b));
    const [lo, hi] = [Math.min(...logs), Math.max(...logs)];
    const [r0, r1] = [pts[0][0], pts[pts.length - 1][0]];
    const px = (r) => 40 + (cv.width - 50) * (r - r0) / (r1 - r0);
    const py = (l) => cv.height - 25 - (cv.height - 35) * (l - lo) / (hi - lo || 1);
    ctx.clearRect(0, 0, cv.width, cv.height);
    ctx.strokeStyle = "#999";
    ctx.strokeRect(40, 10, cv.width - 50, cv.height - 35);
    ctx.fillStyle = "#444";
    ctx.fillText(`log10 B: ${lo.toFixed(2)} .. ${hi.toFixed(2)}`, 45, 22);
    ctx.fillText(`r = ${r0}`, 40, cv.height - 8);
    ctx.fillText(`r = ${r1}`, cv.width - 50, cv.height - 8);
    ctx.strokeStyle = "#06c";
    ctx.beginPath();
    pts.forEach(([r], i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, px(r), py(logs[i])));
    ctx.stroke();
    const last = pts[pts.length - 1];
    return `B(${pts[0][0]}) = ${pts[0][1].toPrecision(6)}\nB(${last[0]}) = ${last[1].toPrecision(6)}  (limit 48/pi = ${(48 / Math.PI).toPrecision(6)})`;
  });
}

const levels = new Map();

function renderHeat() {
  report("heat-out", () => {
    const n = parseInt($("level").value, 10);
    const t0 = performance.now();
    if (!levels.has(n)) levels.set(n, new Level(n));
    const lvl = levels.get(n);
    const cv = $("heat"), ctx = cv.getContext("2d");
    const [nx, ny] = [160, 80];
    const vals = lvl.heatmap(-0.5, 0.5, num("y0"), num("y1"), nx, ny);
    const logs = Array.from(vals, Math.log);
    const [lo, hi] = [Math.min(...logs), Math.max(...logs)];
    const img = ctx.createImageData(nx, ny);
    logs.forEach((l, k) => {
      const [r, g, b] = ramp((l - lo) / (hi - lo || 1));
      img.data.set([r, g, b, 255], 4 * k);
    });
    const tmp = new OffscreenCanvas(nx, ny);
    tmp.getContext("2d").putImageData(img, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(tmp, 0, 0, cv.width, cv.height);
    const max = Math.max(...vals);
    return `genus ${lvl.genus()}, x in [-1/2, 1/2]; max density ${max.toPrecision(6)}; ` +
      `${(performance.now() - t0).toFixed(0)} ms`;
  });
}

function drawOrbit() {
  report("orbit-out", () => {
    const res = JSON.parse(orbit_ball($("group").value, num("ox"), num("oy"), num("orad")));
    const cv = $("orbit"), ctx = cv.getContext("2d");
    const R = cv.width / 2 - 10, c = cv.width / 2;
    ctx.clearRect(0, 0, cv.width, cv.height);
    ctx.strokeStyle = "#999";
    ctx.beginPath();
    ctx.arc(c, c, R, 0, 2 * Math.PI);
    ctx.stroke();
    const rmax = num("orad") || 1;
    for (const p of res.points) {
      // Cayley map to the disk: w = (z - i) / (z + i)
      const den = p.x * p.x + (p.y + 1) ** 2;
      const u = (p.x * p.x + p.y * p.y - 1) / den, v = -2 * p.x / den;
      const [r, g, b] = ramp(p.rho / rmax);
      ctx.fillStyle = `rgb(${r},${g},${b})`;
      ctx.beginPath();
      ctx.arc(c + R * u, c - R * v, p.rho === 0 ? 4 : 2.5, 0, 2 * Math.PI);
      ctx.fill();
    }
    const shortest = res.points.find((p) => p.rho > 1e-9);
    return `${res.points.length} orbit points${res.complete ? "" : " (search budget hit, incomplete)"}` +
      (shortest ? `\nnearest translate: rho = ${shortest.rho.toFixed(6)} via ${shortest.word}` : "");
  });
}

await init();
$("curve-go").onclick = plotCurve;
$("heat-go").onclick = () => {
  const n = parseInt($("level").value, 10);
  if (!levels.has(n)) $("heat-out").textContent = `orthonormalizing the level ${n} basis, a few seconds...`;
  setTimeout(renderHeat, 20);
};
$("orbit-go").onclick = drawOrbit;
plotCurve();
drawOrbit();
