import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

/** Parse one recorded API payload from fixtures/. */
export function fixture<T>(name: string): T {
  const path = fileURLToPath(new URL(`../fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}
