import { describe, expect, it } from "vitest";

import { SchemaError, readHist, readQQ } from "../src/csv";

describe("qq CSV", () => {
  it("reads well-formed rows", () => {
    const rows = readQQ("theoretical,observed\n1.5,1.4\n-0.5,-0.6\n");
    expect(rows).toEqual([
      { theoretical: 1.5, observed: 1.4 },
      { theoretical: -0.5, observed: -0.6 },
    ]);
  });

  it("names the missing column", () => {
    expect(() => readQQ("theoretical,obs\n1,2\n")).toThrow(SchemaError);
    expect(() => readQQ("theoretical,obs\n1,2\n")).toThrow(/observed/);
  });

  it("rejects non-numeric cells with a location", () => {
    expect(() => readQQ("theoretical,observed\n1,x\n")).toThrow(/row 2.*observed/);
  });

  it("rejects an empty table", () => {
    expect(() => readQQ("theoretical,observed\n")).toThrow(/no data rows/);
  });
});

describe("hist CSV", () => {
  it("reads well-formed rows", () => {
    const rows = readHist("bin_lo,bin_hi,count,overlay\n0,0.5,3,0.84\n");
    expect(rows[0]).toEqual({ bin_lo: 0, bin_hi: 0.5, count: 3, overlay: 0.84 });
  });

  it("names all missing columns", () => {
    expect(() => readHist("bin_lo,count\n0,3\n")).toThrow(/bin_hi.*overlay/);
  });
});
