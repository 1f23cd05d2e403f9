import init, { Demo } from "./pkg/medsched_demo.js";

const $ = (id) => document.getElementById(id);
let demo = null;
let last = null;

function show(t) {
  if (!demo) return;
  $("frame").innerHTML = demo.frame(t);
  $("clock").textContent = `${Math.round(t)} ms`;
}

function rebuild(event) {
  event?.preventDefault();
  try {
    demo?.free();
    demo = new Demo(Number($("nodes").value), Number($("delta").value));
    const summary = JSON.parse(
      demo.schedule($("overlap").checked, $("duplicate").checked, Number($("allow").value), $("order").value),
    );
    $("classes").textContent = JSON.stringify(JSON.parse(demo.classify()), null, 2);
    $("summary").textContent = JSON.stringify(summary, null, 2);
    $("summary").className = "";
    $("time").max = String(demo.period);
    show(Number($("time").value));
  } catch (err) {
    demo = null;
    $("summary").textContent = String(err.message ?? err);
    $("summary").className = "error";
  }
}

function tick(now) {
  if ($("play").checked && demo) {
    if (last !== null) {
      const t = (Number($("time").value) + (now - last)) % demo.period;
      $("time").value = String(t);
      show(t);
    }
    last = now;
  } else {
    last = null;
  }
  requestAnimationFrame(tick);
}

await init();
$("controls").addEventListener("submit", rebuild);
$("time").addEventListener("input", () => show(Number($("time").value)));
rebuild();
requestAnimationFrame(tick);
