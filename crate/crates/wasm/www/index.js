import init, { compareLabels, factorizationCounts, connectSample, sampleDatasets } from "./pkg/integraph_wasm.js";

const $ = (id) => document.getElementById(id);

function show(el, value) {
  el.classList.toggle("error", Boolean(value && value.error));
  el.textContent = value && value.error ? value.error : JSON.stringify(value, null, 2);
}

function runCompare() {
  const result = JSON.parse(compareLabels($("cmp-a").value, $("cmp-b").value, $("cmp-kind").value));
  show($("cmp-out"), result);
}

function runFactorization() {
  const out = $("fac-out");
  const rows = JSON.parse(factorizationCounts($("fac-doc").value, $("fac-model").value));
  if (rows.error) {
    out.className = "error";
    out.textContent = rows.error;
    return;
  }
  out.className = "";
  const body = rows.map((r) => `<tr><th>${r.policy}</th><td>${r.nodes}</td><td>${r.edges}</td></tr>`).join("");
  out.innerHTML = `<table><tr><th>policy</th><th>|N|</th><th>|E|</th></tr>${body}</table>`;
}

function runConnect() {
  const started = performance.now();
  const result = JSON.parse(connectSample($("con-from").value, $("con-to").value, Number($("con-hops").value)));
  const out = $("con-out");
  if (result.error) return show(out, result);
  out.classList.remove("error");
  const c = result.connection;
  const elapsed = (performance.now() - started).toFixed(1);
  const header = `graph: ${result.graph.nodes} nodes, ${result.graph.edges} edges (built in ${elapsed} ms)\n\n`;
  if (c.outcome === "path") {
    out.textContent = `${header}${c.links.length} hops\n${result.text}`;
  } else if (c.outcome === "noMatch") {
    out.textContent = `${header}no node labeled ${c.labels.join(", ")}`;
  } else {
    out.textContent = `${header}no path within the hop limit`;
  }
}

function listSamples() {
  const container = $("samples");
  for (const d of JSON.parse(sampleDatasets())) {
    const title = document.createElement("h3");
    title.textContent = d.name;
    const body = document.createElement("pre");
    body.textContent = d.body;
    container.append(title, body);
  }
}

await init();
$("status").textContent = "Ready.";
$("cmp-run").addEventListener("click", runCompare);
$("fac-run").addEventListener("click", runFactorization);
$("con-run").addEventListener("click", runConnect);
listSamples();
runCompare();
runFactorization();
