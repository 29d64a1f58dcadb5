/** Leaderboard and error tables. */

import type { ErrorPage, SystemMeta } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls = "",
  textContent = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (textContent) node.textContent = textContent;
  return node;
}

/** Leaderboard rows arrive pre-sorted by overall value descending; the
 * table renders them in delivered order and never re-sorts. */
export function leaderboardTable(
  rows: SystemMeta[],
  selected: string[],
  onToggle: (systemId: string) => void,
): HTMLTableElement {
  const table = el("table", "leaderboard");
  const head = el("tr");
  for (const title of ["", "#", "system", "metric", "overall", "kind"]) {
    head.appendChild(el("th", "", title));
  }
  table.appendChild(head);
  rows.forEach((row, i) => {
    const tr = el("tr", selected.includes(row.id) ? "selected" : "");
    tr.dataset.systemId = row.id;
    const checkboxCell = el("td");
    const checkbox = el("input") as HTMLInputElement;
    checkbox.type = "checkbox";
    checkbox.checked = selected.includes(row.id);
    checkbox.addEventListener("change", () => onToggle(row.id));
    checkboxCell.appendChild(checkbox);
    tr.appendChild(checkboxCell);
    tr.appendChild(el("td", "rank", String(i + 1)));
    const nameCell = el("td", "name", row.name);
    nameCell.title = row.id;
    tr.appendChild(nameCell);
    tr.appendChild(el("td", "", row.metricName));
    tr.appendChild(
      el("td", "value", row.overallValue === null ? "–" : row.overallValue.toFixed(5)),
    );
    tr.appendChild(el("td", "", row.kind));
    table.appendChild(tr);
  });
  return table;
}

/** Paged error table: gold / predicted / context per mispredicted unit. */
export function errorTable(
  page: ErrorPage,
  systemNames: Record<string, string>,
  onPage: (page: number) => void,
): HTMLElement {
  const container = el("div", "error-table");
  const caption = el(
    "p",
    "error-caption",
    `${page.total} error case${page.total === 1 ? "" : "s"}`,
  );
  container.appendChild(caption);

  const table = el("table");
  const head = el("tr");
  const predictors = Object.keys(page.items[0]?.predicted ?? {});
  const headers = ["sample", "unit", "kind", "gold"];
  for (const id of predictors) headers.push(`pred: ${systemNames[id] ?? id.slice(0, 8)}`);
  headers.push("context");
  for (const title of headers) head.appendChild(el("th", "", title));
  table.appendChild(head);

  for (const item of page.items) {
    const tr = el("tr");
    tr.appendChild(el("td", "", String(item.sampleId)));
    tr.appendChild(
      el(
        "td",
        "",
        item.unitKind === "span" ? `[${item.start}, ${item.end}]` : "sample",
      ),
    );
    tr.appendChild(el("td", `kind-${item.errorKind}`, item.errorKind));
    tr.appendChild(el("td", "gold", item.gold));
    for (const id of predictors) {
      tr.appendChild(el("td", "pred", item.predicted[id] ?? "–"));
    }
    tr.appendChild(el("td", "context", item.context));
    table.appendChild(tr);
  }
  container.appendChild(table);

  const pages = Math.max(1, Math.ceil(page.total / page.pageSize));
  if (pages > 1) {
    const nav = el("div", "pager");
    const prev = el("button", "", "‹ prev") as HTMLButtonElement;
    prev.disabled = page.page <= 1;
    prev.addEventListener("click", () => onPage(page.page - 1));
    const next = el("button", "", "next ›") as HTMLButtonElement;
    next.disabled = page.page >= pages;
    next.addEventListener("click", () => onPage(page.page + 1));
    nav.appendChild(prev);
    nav.appendChild(el("span", "", ` page ${page.page} / ${pages} `));
    nav.appendChild(next);
    container.appendChild(nav);
  }
  return container;
}
