import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { describe, expect, it, vi } from 'vitest';

import { main } from '../src/cli';
import { FIXTURES } from './helpers';

function tmpDir(tag: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `rgbdseg-cli-${tag}-`));
}

describe('cli', () => {
  it('classes prints the label list', async () => {
    const lines: string[] = [];
    const spy = vi.spyOn(process.stdout, 'write').mockImplementation((chunk) => {
      lines.push(String(chunk));
      return true;
    });
    try {
      expect(await main(['classes'])).toBe(0);
    } finally {
      spy.mockRestore();
    }
    const names = lines.join('').trim().split('\n');
    expect(names.length).toBe(80);
    expect(names).toContain('book');
    expect(names).toContain('cup');
  });

  it('rejects unknown flags', async () => {
    expect(await main(['infer', '--image', 'x.png', '--out', 'y', '--bogus', '1'])).toBe(2);
  });

  it('requires --image and --out', async () => {
    expect(await main(['infer', '--image', 'x.png'])).toBe(2);
  });

  it('rejects a non-numeric score', async () => {
    expect(await main([
      'infer', '--image', path.join(FIXTURES, 'desk.png'), '--out', tmpDir('s'),
      '--score', 'high',
    ])).toBe(2);
  });

  it('fails cleanly on an unreadable image', async () => {
    expect(await main([
      'infer', '--image', path.join(FIXTURES, 'missing.png'), '--out', tmpDir('m'),
    ])).toBe(2);
  });

  it('rejects unknown commands', async () => {
    expect(await main(['segment'])).toBe(2);
  });
});
