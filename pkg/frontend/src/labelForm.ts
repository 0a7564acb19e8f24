// Label form state for the labeling screen.
//
// The form is built entirely from the taxonomy document fetched at startup:
// it can express exactly the labels the service declares, nothing else.
// Hierarchy consistency is structural: a specific can only be switched on
// while its general is on, and switching a general off clears its children,
// so an inconsistent submission cannot be produced at all.

import type { TaxonomyDoc } from "./api.js";

export class LabelForm {
  private readonly order: string[];
  private readonly parentOf = new Map<string, string>();
  private readonly childrenOf = new Map<string, string[]>();
  private readonly on = new Map<string, boolean>();

  constructor(doc: TaxonomyDoc) {
    const generals = doc.generals.map((g) => g.slug);
    this.order = [...generals, ...doc.specifics.map((s) => s.slug)];
    for (const general of generals) this.childrenOf.set(general, []);
    for (const specific of doc.specifics) {
      if (!this.childrenOf.has(specific.general)) {
        throw new Error(`specific ${specific.slug} references unknown general ${specific.general}`);
      }
      this.parentOf.set(specific.slug, specific.general);
      this.childrenOf.get(specific.general)!.push(specific.slug);
    }
    for (const slug of this.order) this.on.set(slug, false);
  }

  slugs(): string[] {
    return [...this.order];
  }

  generals(): string[] {
    return [...this.childrenOf.keys()];
  }

  specificsOf(general: string): string[] {
    const children = this.childrenOf.get(general);
    if (!children) throw new Error(`unknown general: ${general}`);
    return [...children];
  }

  isOn(slug: string): boolean {
    const value = this.on.get(slug);
    if (value === undefined) throw new Error(`unknown label: ${slug}`);
    return value;
  }

  // Specifics are only visible (and editable) while their general is on,
  // mirroring the service's hierarchical gating.
  visibleSpecifics(general: string): string[] {
    return this.isOn(general) ? this.specificsOf(general) : [];
  }

  setGeneral(general: string, value: boolean): void {
    if (!this.childrenOf.has(general)) throw new Error(`unknown general: ${general}`);
    this.on.set(general, value);
    if (!value) {
      for (const child of this.childrenOf.get(general)!) this.on.set(child, false);
    }
  }

  toggleGeneral(general: string): void {
    this.setGeneral(general, !this.isOn(general));
  }

  setSpecific(specific: string, value: boolean): void {
    const parent = this.parentOf.get(specific);
    if (!parent) throw new Error(`unknown specific: ${specific}`);
    if (value && !this.isOn(parent)) {
      throw new Error(`cannot enable ${specific}: general ${parent} is off`);
    }
    this.on.set(specific, value);
  }

  toggleSpecific(specific: string): void {
    this.setSpecific(specific, !this.isOn(specific));
  }

  trueSlugs(): string[] {
    return this.order.filter((slug) => this.on.get(slug));
  }

  // Full boolean map over every taxonomy label; consistent by construction.
  payload(): Record<string, boolean> {
    const out: Record<string, boolean> = {};
    for (const slug of this.order) out[slug] = this.on.get(slug)!;
    return out;
  }

  isConsistent(): boolean {
    for (const [specific, parent] of this.parentOf) {
      if (this.on.get(specific) && !this.on.get(parent)) return false;
    }
    return true;
  }

  reset(): void {
    for (const slug of this.order) this.on.set(slug, false);
  }
}
