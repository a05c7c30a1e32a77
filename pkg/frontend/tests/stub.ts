/** Replay recorded API fixtures through the app's fetch seam. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import type { FetchInit, FetchLike, ResponseLike } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

interface ManifestEntry {
  file: string;
  status: number;
  content_type: string;
  body_file?: string;
}

type Manifest = Record<string, ManifestEntry>;

export function fixtureBytes(name: string): Uint8Array {
  return new Uint8Array(readFileSync(join(FIXTURES, name)));
}

export function fixtureJson<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf8")) as T;
}

export function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) {
    return false;
  }
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) {
      return false;
    }
  }
  return true;
}

class AbortError extends Error {
  override name = "AbortError";
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export interface Stub {
  fetch: FetchLike;
  calls: string[];
  plotCalls(): string[];
}

/** Serve fixture bytes keyed by "METHOD url"; unknown requests throw.
 * `delays` maps a url to milliseconds of latency before responding. */
export function makeStub(
  options: { manifest?: string; delays?: Record<string, number> } = {},
): Stub {
  const manifest = fixtureJson<Manifest>(options.manifest ?? "manifest.json");
  const delays = options.delays ?? {};
  const calls: string[] = [];
  const goodUpload = manifest["POST /api/upload"]?.body_file;
  const uploadBody = goodUpload ? fixtureBytes(goodUpload) : null;

  const stubFetch = async (url: string, init?: FetchInit): Promise<ResponseLike> => {
    const method = init?.method ?? "GET";
    calls.push(`${method} ${url}`);
    let key = `${method} ${url}`;
    if (method === "POST" && url === "/api/upload") {
      const body = init?.body ?? new Uint8Array();
      key =
        uploadBody && bytesEqual(body, uploadBody)
          ? "POST /api/upload"
          : "POST /api/upload#malformed";
    }
    const entry = manifest[key];
    if (!entry) {
      throw new Error(`no fixture for ${key}`);
    }
    const wait = delays[url] ?? 0;
    if (wait > 0) {
      await sleep(wait);
    }
    if (init?.signal?.aborted) {
      throw new AbortError("aborted");
    }
    const bytes = fixtureBytes(entry.file);
    return {
      ok: entry.status >= 200 && entry.status < 300,
      status: entry.status,
      arrayBuffer: async () => bytes.slice().buffer as ArrayBuffer,
    };
  };

  return {
    fetch: stubFetch,
    calls,
    plotCalls: () => calls.filter((c) => c.includes("/api/plot/")),
  };
}
