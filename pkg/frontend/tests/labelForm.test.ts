import { describe, expect, it } from "vitest";

import type { TaxonomyDoc } from "../src/api.js";
import { LabelForm } from "../src/labelForm.js";

// A made-up taxonomy: proves the form carries no hard-coded label list.
const FAKE_TAXONOMY: TaxonomyDoc = {
  version: "test",
  generals: [
    { slug: "FOOD", display: "FOOD" },
    { slug: "VENUE", display: "VENUE" },
  ],
  specifics: [
    { slug: "FOOD.Taste", general: "FOOD", display: "Taste" },
    { slug: "FOOD.Portion", general: "FOOD", display: "Portion" },
    { slug: "VENUE.Noise", general: "VENUE", display: "Noise" },
  ],
};

describe("LabelForm", () => {
  it("expresses exactly the fetched taxonomy labels", () => {
    const form = new LabelForm(FAKE_TAXONOMY);
    expect(form.slugs()).toEqual(["FOOD", "VENUE", "FOOD.Taste", "FOOD.Portion", "VENUE.Noise"]);
    expect(Object.keys(form.payload())).toEqual(form.slugs());
  });

  it("hides specifics until their general is on", () => {
    const form = new LabelForm(FAKE_TAXONOMY);
    expect(form.visibleSpecifics("FOOD")).toEqual([]);
    form.setGeneral("FOOD", true);
    expect(form.visibleSpecifics("FOOD")).toEqual(["FOOD.Taste", "FOOD.Portion"]);
  });

  it("blocks enabling a specific while its general is off", () => {
    const form = new LabelForm(FAKE_TAXONOMY);
    expect(() => form.setSpecific("FOOD.Taste", true)).toThrow(/FOOD is off/);
    expect(form.isOn("FOOD.Taste")).toBe(false);
  });

  it("clears child specifics when a general is toggled off", () => {
    const form = new LabelForm(FAKE_TAXONOMY);
    form.setGeneral("FOOD", true);
    form.setSpecific("FOOD.Taste", true);
    form.setSpecific("FOOD.Portion", true);
    form.setGeneral("FOOD", false);
    expect(form.isOn("FOOD.Taste")).toBe(false);
    expect(form.isOn("FOOD.Portion")).toBe(false);
    expect(form.trueSlugs()).toEqual([]);
  });

  it("cannot produce a hierarchy-inconsistent payload", () => {
    const form = new LabelForm(FAKE_TAXONOMY);
    form.setGeneral("FOOD", true);
    form.setSpecific("FOOD.Taste", true);
    form.setGeneral("VENUE", true);
    form.setSpecific("VENUE.Noise", true);
    form.setGeneral("VENUE", false);
    const payload = form.payload();
    for (const specific of FAKE_TAXONOMY.specifics) {
      if (payload[specific.slug]) expect(payload[specific.general]).toBe(true);
    }
    expect(form.isConsistent()).toBe(true);
  });

  it("rejects unknown labels", () => {
    const form = new LabelForm(FAKE_TAXONOMY);
    expect(() => form.setGeneral("PRICE", true)).toThrow(/unknown general/);
    expect(() => form.setSpecific("PRICE.Affordability", true)).toThrow(/unknown specific/);
    expect(() => form.isOn("nope")).toThrow(/unknown label/);
  });

  it("rejects a taxonomy whose specifics point at missing generals", () => {
    expect(
      () =>
        new LabelForm({
          version: "bad",
          generals: [{ slug: "FOOD", display: "FOOD" }],
          specifics: [{ slug: "VENUE.Noise", general: "VENUE", display: "Noise" }],
        }),
    ).toThrow(/unknown general/);
  });
});
