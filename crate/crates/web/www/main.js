import init, { DemoChart } from "./pkg/chartparser_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
let chart = null;

function draw() {
  if (!chart) return;
  const canvas = $("chart");
  const w = chart.width(), h = chart.height();
  canvas.width = w;
  canvas.height = h;
  const bytes = $("show-binary").checked ? chart.binary_rgba(num("binarize")) : chart.rgba();
  canvas.getContext("2d").putImageData(new ImageData(new Uint8ClampedArray(bytes), w, h), 0, 0);
}

function generate() {
  if (chart) chart.free();
  chart = DemoChart.generate(num("seed"), num("index"), num("jitter"), $("antialias").checked);
  $("status").textContent = `${chart.variant()} chart, ${chart.width()}×${chart.height()} px`;
  $("result").innerHTML = "";
  draw();
}

function parse() {
  const t0 = performance.now();
  const out = JSON.parse(chart.parse(num("binarize"), num("band"), num("gap"), num("tolerance")));
  const ms = (performance.now() - t0).toFixed(1);
  const result = $("result");
  result.innerHTML = "";
  if (out.error) {
    const p = document.createElement("p");
    p.className = "error";
    p.textContent = `${out.error.code}: ${out.error.detail}`;
    result.append(p);
  }
  for (const w of out.warnings) {
    const p = document.createElement("p");
    p.textContent = `warning ${w.code}: ${w.detail}`;
    result.append(p);
  }
  if (out.html) result.insertAdjacentHTML("beforeend", out.html);
  const truth = JSON.parse(chart.truth_json());
  const note = document.createElement("p");
  note.textContent = `${out.bars.length} bars, ${out.legend.length} legend entries, ${ms} ms. ` +
    `Ground truth: ${truth.series.map((s) => `${s.name} [${s.values.join(", ")}]`).join("; ")}`;
  result.append(note);
}

await init();
$("generate").addEventListener("click", generate);
$("parse").addEventListener("click", parse);
$("show-binary").addEventListener("change", draw);
$("binarize").addEventListener("input", draw);
generate();
