import init, { Demo } from "./pkg/retcad_wasm.js";

const $ = (id) => document.getElementById(id);
const SCALE = 3;

let demo = null;

function paramValues() {
  return {
    kind: Number($("kind").value),
    size: Number($("size").value),
    seed: Number($("seed").value),
    alphaAuto: $("alpha-auto").checked,
    alpha: Number($("alpha").value),
    delta: Number($("delta").value),
    theta: Number($("theta").value),
    quantiles: Number($("quantiles").value),
    k: Number($("k").value),
    diffMax: Number($("diffmax").value),
    shrink: Number($("shrink").value),
    texStage: Number($("tex-stage").value),
    texPaths: $("tex-paths").checked,
  };
}

function drawRgba(canvas, rgba, w, h) {
  canvas.width = w;
  canvas.height = h;
  canvas.style.width = `${w * SCALE}px`;
  canvas.style.height = `${h * SCALE}px`;
  const ctx = canvas.getContext("2d");
  ctx.putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
}

function drawHistogram(canvas, bins) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, width, height);
  const peak = Math.max(1, ...bins);
  ctx.fillStyle = "#4a7aa5";
  bins.forEach((count, i) => {
    const barH = (count / peak) * (height - 2);
    ctx.fillRect(i, height - barH, 1, barH);
  });
}

const PATH_COLORS = { 0: "#e41a1c", 45: "#ff7f00", 90: "#4daf4a", 135: "#377eb8" };

function drawTexture(p) {
  const w = demo.width(), h = demo.height();
  drawRgba($("cv-tex"), demo.lgs_rgba(p.texStage), w, h);
  if (!p.texPaths) return;
  const ctx = $("cv-tex").getContext("2d");
  const paths = JSON.parse(demo.gsp_paths_json(p.texStage, 4));
  ctx.lineWidth = 0.4;
  for (const path of paths) {
    ctx.strokeStyle = PATH_COLORS[path.dir] ?? "#fff";
    ctx.beginPath();
    path.points.forEach(([x, y], i) => {
      if (i === 0) ctx.moveTo(x + 0.5, y + 0.5);
      else ctx.lineTo(x + 0.5, y + 0.5);
    });
    ctx.stroke();
  }
}

function rebuildPhantom(p) {
  demo = new Demo(p.kind, p.size, p.seed);
  drawRgba($("cv-orig"), demo.original_rgba(), demo.width(), demo.height());
  drawHistogram($("hist-orig"), demo.histogram(0));
}

function runPreprocess(p) {
  const rgba = demo.preprocess_rgba(p.alphaAuto, p.alpha, p.delta, p.theta, p.quantiles);
  drawRgba($("cv-pre"), rgba, demo.width(), demo.height());
  drawHistogram($("hist-pre"), demo.histogram(1));
}

function runEnhance(p) {
  const rgba = demo.enhance_rgba(p.k, p.diffMax, p.shrink);
  drawRgba($("cv-enh"), rgba, demo.width(), demo.height());
  $("tfinals").textContent = `t_final per band: ${Array.from(demo.t_finals()).join(", ")}`;
}

function refresh(stage) {
  const p = paramValues();
  if (stage <= 0) rebuildPhantom(p);
  if (stage <= 1) runPreprocess(p);
  if (stage <= 2) runEnhance(p);
  drawTexture(p);
}

function updateLabels() {
  $("alpha-v").textContent = Number($("alpha").value).toFixed(2);
  $("delta-v").textContent = Number($("delta").value).toFixed(2);
  $("theta-v").textContent = Number($("theta").value).toFixed(2);
  $("quantiles-v").textContent = $("quantiles").value;
  $("k-v").textContent = Number($("k").value).toFixed(1);
  $("diffmax-v").textContent = Number($("diffmax").value).toFixed(2);
  $("shrink-v").textContent = Number($("shrink").value).toFixed(1);
  $("alpha").disabled = $("alpha-auto").checked;
}

async function main() {
  await init();
  updateLabels();
  refresh(0);

  for (const id of ["kind", "size", "seed"]) {
    $(id).addEventListener("change", () => refresh(0));
  }
  for (const id of ["alpha-auto", "alpha", "delta", "theta", "quantiles"]) {
    $(id).addEventListener("change", () => { updateLabels(); refresh(1); });
    $(id).addEventListener("input", updateLabels);
  }
  for (const id of ["k", "diffmax", "shrink"]) {
    $(id).addEventListener("change", () => { updateLabels(); refresh(2); });
    $(id).addEventListener("input", updateLabels);
  }
  for (const id of ["tex-stage", "tex-paths"]) {
    $(id).addEventListener("change", () => drawTexture(paramValues()));
  }
}

main();
