/** Hash router: #/page/arg1/arg2 with query-style params after "?". */

export interface Route {
  page: string;
  args: string[];
  params: URLSearchParams;
}

export function parseHash(hash: string): Route {
  const raw = hash.replace(/^#\/?/, "");
  const [pathPart, queryPart] = raw.split("?");
  const segments = pathPart.split("/").filter(Boolean);
  return {
    page: segments[0] || "dashboard",
    args: segments.slice(1).map(decodeURIComponent),
    params: new URLSearchParams(queryPart ?? ""),
  };
}

export function toHash(page: string, args: string[] = [], params?: Record<string, string>): string {
  const path = [page, ...args.map(encodeURIComponent)].join("/");
  const query = params ? "?" + new URLSearchParams(params).toString() : "";
  return `#/${path}${query}`;
}
