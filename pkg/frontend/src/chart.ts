// Pure layout for the coefficient bar chart and the consistency scatter
// plots. Values arrive straight from service payloads.

export const COEFF_LABELS = [
  "l00", "l1m1", "l10", "l11", "l2m2", "l2m1", "l20", "l21", "l22",
] as const;

export const NORMALIZED_LABELS = COEFF_LABELS.slice(1);

export type Bar = {
  label: string;
  value: number;
  x: number;
  y: number;
  w: number;
  h: number;
};

// Bars share a symmetric value range so sign flips are visible; a zero
// value yields a zero-height bar sitting on the baseline.
export function coefficientBars(
  values: number[],
  width: number,
  height: number,
  gap = 4,
): Bar[] {
  if (values.length !== COEFF_LABELS.length) {
    throw new Error(`expected ${COEFF_LABELS.length} coefficients, got ${values.length}`);
  }
  const limit = Math.max(1e-12, ...values.map((v) => Math.abs(v)));
  const barW = (width - gap * (values.length + 1)) / values.length;
  const mid = height / 2;
  return values.map((value, i) => {
    const h = (Math.abs(value) / limit) * (height / 2);
    return {
      label: COEFF_LABELS[i] as string,
      value,
      x: gap + i * (barW + gap),
      y: value >= 0 ? mid - h : mid,
      w: barW,
      h,
    };
  });
}

export type ScatterPoint = { x: number; y: number; a: number; b: number };

export type ScatterLayout = {
  points: ScatterPoint[];
  // display endpoints of the identity line a = b
  identity: { x0: number; y0: number; x1: number; y1: number };
  min: number;
  max: number;
};

// Square plot of paired values with the identity diagonal; equal axes so
// agreement reads as points hugging the diagonal.
export function scatterLayout(
  pairs: [number, number][],
  size: number,
  padding = 8,
): ScatterLayout {
  let min = Infinity;
  let max = -Infinity;
  for (const [a, b] of pairs) {
    min = Math.min(min, a, b);
    max = Math.max(max, a, b);
  }
  if (!isFinite(min)) {
    min = -1;
    max = 1;
  }
  if (max - min < 1e-12) {
    min -= 0.5;
    max += 0.5;
  }
  const span = max - min;
  const scale = (size - 2 * padding) / span;
  const toX = (v: number) => padding + (v - min) * scale;
  const toY = (v: number) => size - padding - (v - min) * scale;
  return {
    points: pairs.map(([a, b]) => ({ x: toX(a), y: toY(b), a, b })),
    identity: { x0: toX(min), y0: toY(min), x1: toX(max), y1: toY(max) },
    min,
    max,
  };
}
