import assert from "node:assert/strict";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { main } from "../src/cli.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "test", "fixtures");

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "quantdoa-figures-"));
}

test("renders all three figure kinds end to end", () => {
  const dir = tmp();
  for (const [kind, file] of [
    ["fig2", "loss_vs_bits.csv"],
    ["fig3", "loss_vs_snr.csv"],
    ["fig4", "rmse_vs_snr.csv"],
  ] as const) {
    const out = join(dir, `${kind}.svg`);
    const code = main(["render", "--kind", kind, "--in", join(FIXTURES, file), "--out", out]);
    assert.equal(code, 0);
    const svg = readFileSync(out, "utf-8");
    assert.ok(svg.startsWith("<svg"));
    assert.ok(svg.includes("<polyline"));
  }
});

test("usage errors exit 1", () => {
  assert.equal(main([]), 1);
  assert.equal(main(["render", "--kind", "fig9", "--in", "x", "--out", "y"]), 1);
  assert.equal(main(["render", "--kind", "fig2", "--in", "x.csv"]), 1);
});

test("unreadable input exits 3", () => {
  assert.equal(main(["render", "--kind", "fig2", "--in", "/no/such.csv", "--out", "/tmp/x.svg"]), 3);
});

test("empty data exits 2", () => {
  const dir = tmp();
  const csv = join(dir, "empty.csv");
  writeFileSync(
    csv,
    "# kind = loss_vs_snr\nsweep_var,b,estimator,rmse_deg,crlb_sqrt_deg,eta_db,trials,failures\n",
  );
  assert.equal(main(["render", "--kind", "fig3", "--in", csv, "--out", join(dir, "x.svg")]), 2);
});

test("unwritable output exits 3", () => {
  const code = main([
    "render",
    "--kind",
    "fig3",
    "--in",
    join(FIXTURES, "loss_vs_snr.csv"),
    "--out",
    "/no/such/dir/out.svg",
  ]);
  assert.equal(code, 3);
});
