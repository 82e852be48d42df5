// Starts the backing service on a scratch data directory for the UI tests.
// Requires the Python package to be installed in the active environment.

import { ChildProcess, spawn } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { get } from 'node:http';
import { AddressInfo, createServer } from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

interface SetupContext {
  provide(key: string, value: unknown): void;
}

let child: ChildProcess | null = null;
let dataDir = '';

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.on('error', reject);
    server.listen(0, '127.0.0.1', () => {
      const port = (server.address() as AddressInfo).port;
      server.close(() => resolve(port));
    });
  });
}

function probe(url: string): Promise<boolean> {
  // Plain http.get with no agent: fetch() would park keep-alive sockets in
  // the runner's main process and block its shutdown.
  return new Promise((resolve) => {
    const request = get(`${url}/api/projects`, { agent: false }, (response) => {
      response.resume();
      resolve(response.statusCode === 200);
    });
    request.on('error', () => resolve(false));
  });
}

async function waitReady(url: string): Promise<void> {
  for (let attempt = 0; attempt < 150; attempt++) {
    if (await probe(url)) return;
    if (child?.exitCode !== null) throw new Error(`service exited with ${child?.exitCode}`);
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error('service never became ready');
}

export default async function setup({ provide }: SetupContext): Promise<() => void> {
  dataDir = mkdtempSync(join(tmpdir(), 'onda-ui-'));
  const port = await freePort();
  const url = `http://127.0.0.1:${port}`;
  // stdio fully ignored: any pipe to the long-lived child would keep the
  // runner's event loop alive after the suite finishes.
  child = spawn('python3', ['-m', 'onda.service'], {
    env: { ...process.env, ONDA_DATA_DIR: dataDir, ONDA_HOST: '127.0.0.1', ONDA_PORT: String(port) },
    stdio: 'ignore',
  });
  child.unref();
  await waitReady(url);
  provide('serviceUrl', url);

  return () => {
    child?.kill('SIGKILL');
    rmSync(dataDir, { recursive: true, force: true });
  };
}
