/** Dense row-major float64 tensors; the only data that crosses the bridge. */

export interface Matrix {
  data: Float64Array;
  shape: number[];
}

export function sizeOf(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function tensor(shape: number[], data?: ArrayLike<number>): Matrix {
  const size = sizeOf(shape);
  if (data !== undefined && data.length !== size) {
    throw new Error(`data length ${data.length} does not match shape [${shape}]`);
  }
  return { data: data ? Float64Array.from(data) : new Float64Array(size), shape: [...shape] };
}

export function ones(shape: number[]): Matrix {
  const out = tensor(shape);
  out.data.fill(1);
  return out;
}

/** Normalize nested rows into one contiguous row-major buffer. */
export function fromRows(rows: ArrayLike<number>[]): Matrix {
  const numRows = rows.length;
  const numCols = numRows > 0 ? rows[0].length : 0;
  const out = tensor([numRows, numCols]);
  for (let r = 0; r < numRows; r++) {
    if (rows[r].length !== numCols) {
      throw new Error(`row ${r} has length ${rows[r].length}, expected ${numCols}`);
    }
    out.data.set(Array.from(rows[r]), r * numCols);
  }
  return out;
}

export function addInto(target: Matrix, other: Matrix): void {
  if (target.data.length !== other.data.length) {
    throw new Error(`cannot accumulate [${other.shape}] into [${target.shape}]`);
  }
  for (let i = 0; i < target.data.length; i++) target.data[i] += other.data[i];
}

export function clone(m: Matrix): Matrix {
  return { data: Float64Array.from(m.data), shape: [...m.shape] };
}

export function shapesEqual(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}
