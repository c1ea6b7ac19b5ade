// Drives one DemoRun generation at a time and draws its state onto the
// four canvases. Build the wasm package into ./pkg first (see README).

import init, { DemoRun, trap_block_curve } from "./pkg/dae_eda_web.js";

const $ = (id) => document.getElementById(id);
const status = $("status");

let run = null;
let playing = null;

function controls() {
  return {
    algo: $("algo").value,
    trapk: Number($("trapk").value),
    blocks: Number($("blocks").value),
    popsize: Number($("popsize").value),
    seed: Number($("seed").value),
  };
}

function reset() {
  stop();
  const c = controls();
  try {
    run = new DemoRun(c.algo, c.trapk, c.blocks, c.popsize, c.seed);
  } catch (err) {
    run = null;
    status.textContent = `error: ${err}`;
    return;
  }
  drawTrapCurve(c.trapk);
  redraw();
}

function step() {
  if (!run) return;
  try {
    const finished = run.step();
    redraw();
    if (finished) stop();
  } catch (err) {
    status.textContent = `error: ${err}`;
    stop();
  }
}

function stop() {
  if (playing !== null) {
    clearInterval(playing);
    playing = null;
    $("play").textContent = "Play";
  }
}

function togglePlay() {
  if (!run) return;
  if (playing !== null) {
    stop();
    return;
  }
  $("play").textContent = "Pause";
  playing = setInterval(() => {
    if (!run || run.stop_reason() !== "") stop();
    else step();
  }, 60);
}

function redraw() {
  if (!run) return;
  const reason = run.stop_reason();
  status.textContent =
    `generation ${run.generation()}  |  evaluations ${run.evaluations()}  |  ` +
    `best ${run.best_fitness()} of ${run.optimum()}` +
    (reason ? `  |  finished: ${reason}` : "");
  drawFitness();
  drawMarginals();
  drawPopulation();
}

function frame(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

function drawFitness() {
  const canvas = $("fitness");
  const ctx = frame(canvas);
  const best = run.best_history();
  const mean = run.mean_history();
  const top = run.optimum();
  const low = Math.min(...mean, ...best, 0);
  const pad = 10;
  const x = (i, len) =>
    pad + (len < 2 ? 0 : (i * (canvas.width - 2 * pad)) / (len - 1));
  const y = (v) =>
    canvas.height - pad - ((v - low) * (canvas.height - 2 * pad)) / (top - low || 1);

  ctx.strokeStyle = "#b33";
  ctx.setLineDash([4, 3]);
  ctx.beginPath();
  ctx.moveTo(pad, y(top));
  ctx.lineTo(canvas.width - pad, y(top));
  ctx.stroke();

  const polyline = (values, dash, color) => {
    ctx.setLineDash(dash);
    ctx.strokeStyle = color;
    ctx.beginPath();
    values.forEach((v, i) => {
      const px = x(i, values.length);
      i === 0 ? ctx.moveTo(px, y(v)) : ctx.lineTo(px, y(v));
    });
    ctx.stroke();
  };
  polyline(mean, [5, 4], "#888");
  polyline(best, [], "#1a56a0");
}

function drawMarginals() {
  const canvas = $("marginals");
  const ctx = frame(canvas);
  const m = run.marginals();
  if (m.length === 0) {
    ctx.fillStyle = "#888";
    ctx.fillText("no model yet — step once", 12, 20);
    return;
  }
  const k = controls().trapk;
  const w = canvas.width / m.length;
  m.forEach((p, i) => {
    const h = p * (canvas.height - 14);
    // Alternate block shading so block boundaries are visible.
    ctx.fillStyle = Math.floor(i / k) % 2 === 0 ? "#1a56a0" : "#4d85c6";
    ctx.fillRect(i * w + 1, canvas.height - h, w - 2, h);
  });
  ctx.strokeStyle = "#b33";
  ctx.setLineDash([4, 3]);
  ctx.beginPath();
  ctx.moveTo(0, 14);
  ctx.lineTo(canvas.width, 14);
  ctx.stroke();
  ctx.setLineDash([]);
}

function drawPopulation() {
  const canvas = $("population");
  const ctx = frame(canvas);
  const bits = run.population_bits();
  const n = run.n();
  const rows = run.popsize();
  const cw = canvas.width / n;
  const ch = canvas.height / rows;
  ctx.fillStyle = "#223";
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < n; c++) {
      if (bits[r * n + c]) {
        ctx.fillRect(c * cw, r * ch, Math.ceil(cw), Math.ceil(ch));
      }
    }
  }
}

function drawTrapCurve(k) {
  const canvas = $("trapcurve");
  const ctx = frame(canvas);
  const curve = trap_block_curve(k);
  const pad = 16;
  const w = (canvas.width - 2 * pad) / (curve.length - 1);
  const y = (v) =>
    canvas.height - pad - (v * (canvas.height - 2 * pad)) / Math.max(...curve);
  ctx.strokeStyle = "#1a56a0";
  ctx.beginPath();
  curve.forEach((v, i) => {
    i === 0 ? ctx.moveTo(pad + i * w, y(v)) : ctx.lineTo(pad + i * w, y(v));
  });
  ctx.stroke();
  ctx.fillStyle = "#1a56a0";
  curve.forEach((v, i) => {
    ctx.beginPath();
    ctx.arc(pad + i * w, y(v), 3, 0, 2 * Math.PI);
    ctx.fill();
  });
  ctx.fillStyle = "#555";
  ctx.fillText("0 ones", pad - 6, canvas.height - 2);
  ctx.fillText(`${k} ones`, canvas.width - pad - 18, canvas.height - 2);
}

await init();
$("reset").addEventListener("click", reset);
$("step").addEventListener("click", step);
$("play").addEventListener("click", togglePlay);
reset();
