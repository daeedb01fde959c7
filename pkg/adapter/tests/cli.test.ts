import { existsSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it, vi } from "vitest";

import { main } from "../src/cli.js";
import { FIXTURE_FRAMES, FIXTURE_SRT, tempDir } from "./helpers.js";

function quiet() {
  return [
    vi.spyOn(console, "log").mockImplementation(() => {}),
    vi.spyOn(console, "error").mockImplementation(() => {}),
  ];
}

describe("cli main", () => {
  it("extracts the fixture with exit 0", async () => {
    const spies = quiet();
    const out = tempDir("vned-cli-");
    const code = await main([
      "--frames", FIXTURE_FRAMES,
      "--subs", FIXTURE_SRT,
      "--out", out,
      "--video", "ep01",
    ]);
    expect(code).toBe(0);
    expect(existsSync(join(out, "detections.jsonl"))).toBe(true);
    expect(existsSync(join(out, "mentions.jsonl"))).toBe(true);
    expect(existsSync(join(out, "manifest.json"))).toBe(true);
    spies.forEach((s) => s.mockRestore());
  });

  it("exits 1 on missing required flags, unknown flags, bad values", async () => {
    const spies = quiet();
    expect(await main([])).toBe(1);
    expect(await main(["--frames", FIXTURE_FRAMES])).toBe(1);
    expect(await main(["--bogus", "x"])).toBe(1);
    expect(
      await main([
        "--frames", FIXTURE_FRAMES, "--subs", FIXTURE_SRT,
        "--out", tempDir("c-"), "--margin", "-3",
      ]),
    ).toBe(1);
    expect(
      await main([
        "--frames", FIXTURE_FRAMES, "--subs", FIXTURE_SRT,
        "--out", tempDir("c-"), "--fps", "0",
      ]),
    ).toBe(1);
    expect(
      await main([
        "--frames", FIXTURE_FRAMES, "--subs", FIXTURE_SRT,
        "--out", tempDir("c-"), "--entities", "verbs",
      ]),
    ).toBe(1);
    spies.forEach((s) => s.mockRestore());
  });

  it("exits 2 on bad input data", async () => {
    const spies = quiet();
    expect(
      await main([
        "--frames", "/nonexistent",
        "--subs", FIXTURE_SRT,
        "--out", tempDir("c-"),
      ]),
    ).toBe(2);
    const badSrt = join(tempDir("c-"), "bad.srt");
    writeFileSync(badSrt, "1\nnot a timestamp\ntext\n");
    expect(
      await main([
        "--frames", FIXTURE_FRAMES,
        "--subs", badSrt,
        "--out", tempDir("c-"),
      ]),
    ).toBe(2);
    spies.forEach((s) => s.mockRestore());
  });

  it("exits 4 when the backend is unavailable", async () => {
    const spies = quiet();
    expect(
      await main([
        "--frames", FIXTURE_FRAMES,
        "--subs", FIXTURE_SRT,
        "--out", tempDir("c-"),
        "--backend", "facenet",
      ]),
    ).toBe(4);
    spies.forEach((s) => s.mockRestore());
  });

  it("prints usage with --help", async () => {
    const log = vi.spyOn(console, "log").mockImplementation(() => {});
    expect(await main(["--help"])).toBe(0);
    expect(log.mock.calls.flat().join("\n")).toContain("vned-extract");
    log.mockRestore();
  });
});
