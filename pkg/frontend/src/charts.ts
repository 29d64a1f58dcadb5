/** Hand-rolled SVG charts: performance histograms with CI whiskers,
 * diverging gap bars, ensemble comparison, calibration diagnostics.
 * Builders are pure DOM factories; interactivity arrives via callbacks. */

import type {
  BucketPerformance,
  CalibrationReport,
  MemberOverall,
  PairBucketGap,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attrs)) {
    el.setAttribute(name, String(value));
  }
  return el;
}

function text(x: number, y: number, content: string, cls = ""): SVGTextElement {
  const el = svgEl("text", { x, y, class: cls });
  el.textContent = content;
  return el;
}

const W = 460;
const H = 220;
const MARGIN = { top: 14, right: 10, bottom: 46, left: 40 };

function frame(title: string): SVGSVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${W} ${H}`,
    width: W,
    height: H,
    class: "chart",
    role: "img",
  });
  svg.appendChild(text(MARGIN.left, 11, title, "chart-title"));
  const defs = svgEl("defs");
  const pattern = svgEl("pattern", {
    id: "hatch",
    width: 6,
    height: 6,
    patternUnits: "userSpaceOnUse",
    patternTransform: "rotate(45)",
  });
  pattern.appendChild(svgEl("rect", { width: 6, height: 6, fill: "#f4f4f4" }));
  pattern.appendChild(
    svgEl("line", { x1: 0, y1: 0, x2: 0, y2: 6, stroke: "#bbb", "stroke-width": 2 }),
  );
  defs.appendChild(pattern);
  svg.appendChild(defs);
  return svg;
}

function plotArea(): { x0: number; y0: number; width: number; height: number } {
  return {
    x0: MARGIN.left,
    y0: MARGIN.top,
    width: W - MARGIN.left - MARGIN.right,
    height: H - MARGIN.top - MARGIN.bottom,
  };
}

function barLabel(svg: SVGSVGElement, x: number, label: string): void {
  const shortened = label.length > 11 ? `${label.slice(0, 10)}…` : label;
  const el = text(x, H - MARGIN.bottom + 14, shortened, "tick");
  el.setAttribute("text-anchor", "middle");
  const tip = svgEl("title");
  tip.textContent = label;
  el.appendChild(tip);
  svg.appendChild(el);
}

/** Performance histogram: one bar per bucket, whiskers for [ciLow, ciHigh],
 * hatched empty bars for null buckets.  Every bar is clickable. */
export function histogramChart(
  attribute: string,
  series: BucketPerformance[],
  onBarClick?: (bucketKey: string) => void,
): SVGSVGElement {
  const svg = frame(attribute);
  const area = plotArea();
  const top = Math.max(1, ...series.map((b) => b.value ?? 0));
  const scaleY = (v: number) => area.y0 + area.height * (1 - v / top);
  const slot = area.width / Math.max(1, series.length);
  const barWidth = Math.min(46, slot * 0.62);

  // y axis: 0 and top
  svg.appendChild(text(6, scaleY(0) + 4, "0", "tick"));
  svg.appendChild(text(6, scaleY(top) + 4, top.toFixed(top === 1 ? 0 : 2), "tick"));
  svg.appendChild(
    svgEl("line", {
      x1: area.x0, y1: scaleY(0), x2: area.x0 + area.width, y2: scaleY(0),
      class: "axis",
    }),
  );

  series.forEach((bucket, i) => {
    const cx = area.x0 + slot * i + slot / 2;
    const x = cx - barWidth / 2;
    if (bucket.value === null) {
      const rect = svgEl("rect", {
        x, y: area.y0, width: barWidth, height: area.height,
        fill: "url(#hatch)", class: "bar bar-empty",
        "data-bucket": `${attribute}|${bucket.key}`,
      });
      const tip = svgEl("title");
      tip.textContent = `${bucket.key}: no data (n=0)`;
      rect.appendChild(tip);
      svg.appendChild(rect);
    } else {
      const y = scaleY(bucket.value);
      const rect = svgEl("rect", {
        x, y, width: barWidth, height: scaleY(0) - y,
        class: "bar", "data-bucket": `${attribute}|${bucket.key}`,
      });
      const tip = svgEl("title");
      tip.textContent =
        `${bucket.key}: ${bucket.value.toFixed(4)} ` +
        `[${bucket.ciLow?.toFixed(4)}, ${bucket.ciHigh?.toFixed(4)}] n=${bucket.n}`;
      rect.appendChild(tip);
      if (onBarClick) {
        rect.classList.add("clickable");
        rect.addEventListener("click", () => onBarClick(`${attribute}|${bucket.key}`));
      }
      svg.appendChild(rect);
      if (bucket.ciLow !== null && bucket.ciHigh !== null) {
        const lo = scaleY(bucket.ciLow);
        const hi = scaleY(bucket.ciHigh);
        svg.appendChild(svgEl("line", { x1: cx, y1: lo, x2: cx, y2: hi, class: "whisker" }));
        svg.appendChild(svgEl("line", { x1: cx - 5, y1: lo, x2: cx + 5, y2: lo, class: "whisker" }));
        svg.appendChild(svgEl("line", { x1: cx - 5, y1: hi, x2: cx + 5, y2: hi, class: "whisker" }));
      }
    }
    barLabel(svg, cx, bucket.key);
  });
  return svg;
}

/** Gap histogram: signed bars diverging around a zero line. */
export function gapChart(attribute: string, series: PairBucketGap[]): SVGSVGElement {
  const svg = frame(`${attribute} gap (A − B)`);
  const area = plotArea();
  const extent = Math.max(0.05, ...series.map((b) => Math.abs(b.gap ?? 0)));
  const zero = area.y0 + area.height / 2;
  const scale = (area.height / 2) / extent;
  svg.appendChild(
    svgEl("line", {
      x1: area.x0, y1: zero, x2: area.x0 + area.width, y2: zero, class: "axis",
    }),
  );
  const slot = area.width / Math.max(1, series.length);
  const barWidth = Math.min(46, slot * 0.62);
  series.forEach((bucket, i) => {
    const cx = area.x0 + slot * i + slot / 2;
    const x = cx - barWidth / 2;
    if (bucket.gap === null) {
      svg.appendChild(
        svgEl("rect", {
          x, y: zero - 8, width: barWidth, height: 16,
          fill: "url(#hatch)", class: "bar bar-empty",
        }),
      );
    } else {
      const h = Math.abs(bucket.gap) * scale;
      const rect = svgEl("rect", {
        x,
        y: bucket.gap >= 0 ? zero - h : zero,
        width: barWidth,
        height: Math.max(h, 0.5),
        class: bucket.gap >= 0 ? "bar bar-pos" : "bar bar-neg",
      });
      const tip = svgEl("title");
      tip.textContent = `${bucket.key}: gap ${bucket.gap.toFixed(4)} (n=${bucket.n})`;
      rect.appendChild(tip);
      svg.appendChild(rect);
    }
    barLabel(svg, cx, bucket.key);
  });
  return svg;
}

/** Ensemble chart: member bars plus the `comb` bar. */
export function ensembleChart(
  members: MemberOverall[],
  combinedValue: number,
): SVGSVGElement {
  const svg = frame("ensemble (overall)");
  const area = plotArea();
  const rows = [
    ...members.map((m) => ({ label: m.name, value: m.value, comb: false })),
    { label: "comb", value: combinedValue, comb: true },
  ];
  const top = Math.max(1, ...rows.map((r) => r.value));
  const scaleY = (v: number) => area.y0 + area.height * (1 - v / top);
  const slot = area.width / rows.length;
  const barWidth = Math.min(56, slot * 0.62);
  svg.appendChild(
    svgEl("line", {
      x1: area.x0, y1: scaleY(0), x2: area.x0 + area.width, y2: scaleY(0),
      class: "axis",
    }),
  );
  rows.forEach((row, i) => {
    const cx = area.x0 + slot * i + slot / 2;
    const y = scaleY(row.value);
    const rect = svgEl("rect", {
      x: cx - barWidth / 2, y, width: barWidth, height: scaleY(0) - y,
      class: row.comb ? "bar bar-comb" : "bar",
      "data-member": row.label,
      "data-value": row.value,
    });
    const tip = svgEl("title");
    tip.textContent = `${row.label}: ${row.value.toFixed(4)}`;
    rect.appendChild(tip);
    svg.appendChild(rect);
    const valueLabel = text(cx, y - 3, row.value.toFixed(3), "tick");
    valueLabel.setAttribute("text-anchor", "middle");
    svg.appendChild(valueLabel);
    barLabel(svg, cx, row.label);
  });
  return svg;
}

/** Calibration: confidence histogram plus reliability bars with the
 * identity diagonal. */
export function calibrationChart(report: CalibrationReport): DocumentFragment {
  const fragment = document.createDocumentFragment();

  const hist = frame("confidence histogram");
  const area = plotArea();
  const maxN = Math.max(1, ...report.confidenceHistogram);
  const slot = area.width / report.bins.length;
  report.bins.forEach((bin, i) => {
    const h = (bin.n / maxN) * area.height;
    const rect = svgEl("rect", {
      x: area.x0 + slot * i + 2,
      y: area.y0 + area.height - h,
      width: slot - 4,
      height: h,
      class: "bar bar-conf",
    });
    const tip = svgEl("title");
    tip.textContent = `(${bin.low.toFixed(1)},${bin.high.toFixed(1)}]: n=${bin.n}`;
    rect.appendChild(tip);
    hist.appendChild(rect);
    barLabel(hist, area.x0 + slot * i + slot / 2, bin.high.toFixed(1));
  });
  fragment.appendChild(hist);

  const reliability = frame(`reliability diagram (ECE ${report.ece.toFixed(4)})`);
  reliability.appendChild(
    svgEl("line", {
      x1: area.x0, y1: area.y0 + area.height,
      x2: area.x0 + area.width, y2: area.y0,
      class: "diagonal",
    }),
  );
  report.bins.forEach((bin, i) => {
    if (bin.accuracy === null) return;
    const h = bin.accuracy * area.height;
    const rect = svgEl("rect", {
      x: area.x0 + slot * i + 2,
      y: area.y0 + area.height - h,
      width: slot - 4,
      height: h,
      class: "bar bar-acc",
    });
    const tip = svgEl("title");
    tip.textContent =
      `conf ${bin.meanConfidence?.toFixed(3)} vs acc ${bin.accuracy.toFixed(3)} (n=${bin.n})`;
    rect.appendChild(tip);
    reliability.appendChild(rect);
  });
  fragment.appendChild(reliability);
  return fragment;
}
