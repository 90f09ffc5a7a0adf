/** Deterministic SVG scene construction: no randomness, no timestamps,
 * fixed float formatting, so re-renders are byte-identical. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 34, right: 24, bottom: 44, left: 58 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  apply(x: number): number {
    const t = (x - this.d0) / (this.d1 - this.d0 || 1);
    return this.r0 + t * (this.r1 - this.r0);
  }

  ticks(n = 6): number[] {
    const span = this.d1 - this.d0;
    if (span <= 0) return [this.d0];
    const step = niceStep(span / n);
    const start = Math.ceil(this.d0 / step) * step;
    const out: number[] = [];
    for (let v = start; v <= this.d1 + 1e-12 * span; v += step) {
      out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
    }
    return out;
  }
}

function niceStep(raw: number): number {
  const pow = Math.pow(10, Math.floor(Math.log10(raw)));
  const frac = raw / pow;
  const nice = frac < 1.5 ? 1 : frac < 3.5 ? 2 : frac < 7.5 ? 5 : 10;
  return nice * pow;
}

function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 10000 || a < 0.001)) return v.toExponential(0);
  return String(Math.round(v * 1e6) / 1e6);
}

export class Scene {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
    readonly title: string,
    readonly margin: Margin = DEFAULT_MARGIN,
  ) {
    this.parts.push(
      `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`,
      `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14" ` +
        `font-family="sans-serif" font-weight="bold">${esc(title)}</text>`,
    );
  }

  plotArea(): { x0: number; x1: number; y0: number; y1: number } {
    return {
      x0: this.margin.left,
      x1: this.width - this.margin.right,
      y0: this.height - this.margin.bottom,
      y1: this.margin.top,
    };
  }

  scales(xd: [number, number], yd: [number, number]): [LinearScale, LinearScale] {
    const a = this.plotArea();
    return [new LinearScale(xd[0], xd[1], a.x0, a.x1), new LinearScale(yd[0], yd[1], a.y0, a.y1)];
  }

  axes(sx: LinearScale, sy: LinearScale, xLabel: string, yLabel: string): void {
    const a = this.plotArea();
    this.parts.push(
      `<line x1="${a.x0}" y1="${a.y0}" x2="${a.x1}" y2="${a.y0}" stroke="black"/>`,
      `<line x1="${a.x0}" y1="${a.y0}" x2="${a.x0}" y2="${a.y1}" stroke="black"/>`,
    );
    for (const t of sx.ticks()) {
      const px = sx.apply(t);
      this.parts.push(
        `<line x1="${fmt(px)}" y1="${a.y0}" x2="${fmt(px)}" y2="${a.y0 + 4}" stroke="black"/>`,
        `<text x="${fmt(px)}" y="${a.y0 + 16}" text-anchor="middle" font-size="10" ` +
          `font-family="sans-serif">${tickLabel(t)}</text>`,
      );
    }
    for (const t of sy.ticks()) {
      const py = sy.apply(t);
      this.parts.push(
        `<line x1="${a.x0 - 4}" y1="${fmt(py)}" x2="${a.x0}" y2="${fmt(py)}" stroke="black"/>`,
        `<text x="${a.x0 - 7}" y="${fmt(py + 3)}" text-anchor="end" font-size="10" ` +
          `font-family="sans-serif">${tickLabel(t)}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(a.x0 + a.x1) / 2}" y="${this.height - 8}" text-anchor="middle" ` +
        `font-size="12" font-family="sans-serif">${esc(xLabel)}</text>`,
      `<text x="14" y="${(a.y0 + a.y1) / 2}" text-anchor="middle" font-size="12" ` +
        `font-family="sans-serif" transform="rotate(-90 14 ${(a.y0 + a.y1) / 2})">${esc(yLabel)}</text>`,
    );
  }

  polyline(
    xs: number[],
    ys: number[],
    sx: LinearScale,
    sy: LinearScale,
    color: string,
    opts: { dashed?: boolean; width?: number } = {},
  ): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
      pts.push(`${fmt(sx.apply(xs[i]))},${fmt(sy.apply(ys[i]))}`);
    }
    const dash = opts.dashed ? ` stroke-dasharray="6 4"` : "";
    this.parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="${opts.width ?? 1.5}"` +
        `${dash} points="${pts.join(" ")}"/>`,
    );
  }

  verticalMarker(x: number, sx: LinearScale, label: string, color = "#888"): void {
    const a = this.plotArea();
    const px = fmt(sx.apply(x));
    this.parts.push(
      `<line x1="${px}" y1="${a.y0}" x2="${px}" y2="${a.y1}" stroke="${color}" ` +
        `stroke-dasharray="3 3" class="stage-marker"/>`,
      `<text x="${px}" y="${a.y1 - 4}" text-anchor="middle" font-size="10" ` +
        `font-family="sans-serif" fill="${color}">${esc(label)}</text>`,
    );
  }

  bar(x: number, y: number, w: number, h: number, color: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
        `fill="${color}" stroke="black" stroke-width="0.5"/>`,
    );
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; color?: string } = {}): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${opts.anchor ?? "middle"}" ` +
        `font-size="${opts.size ?? 11}" font-family="sans-serif" ` +
        `fill="${opts.color ?? "black"}">${esc(s)}</text>`,
    );
  }

  legend(entries: Array<{ label: string; color: string; dashed?: boolean }>): void {
    const a = this.plotArea();
    let y = a.y1 + 12;
    for (const e of entries) {
      const x = a.x1 - 130;
      const dash = e.dashed ? ` stroke-dasharray="6 4"` : "";
      this.parts.push(
        `<line x1="${x}" y1="${y - 4}" x2="${x + 26}" y2="${y - 4}" stroke="${e.color}" ` +
          `stroke-width="2"${dash}/>`,
        `<text x="${x + 32}" y="${y}" font-size="11" font-family="sans-serif">${esc(e.label)}</text>`,
      );
      y += 16;
    }
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
