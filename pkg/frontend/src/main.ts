// Bootstrap: mount the editor and wire the project open/new controls.

import { OndaApi } from './api.js';
import { OndaApp } from './app.js';

async function boot(): Promise<void> {
  const api = new OndaApi('');
  const app = new OndaApp(document, api);

  const picker = document.querySelector<HTMLSelectElement>('[data-role="project-picker"]')!;
  const refreshPicker = async () => {
    const projects = await api.listProjects();
    picker.innerHTML = '<option value="">open project…</option>';
    for (const project of projects) {
      const option = document.createElement('option');
      option.value = project.id;
      option.textContent = `${project.name} (v${project.version})`;
      picker.appendChild(option);
    }
  };
  picker.addEventListener('change', () => {
    if (picker.value) void app.openProject(picker.value);
  });

  document.querySelector('[data-role="new-project"]')!.addEventListener('click', () => {
    const name = prompt('Project name?', app.state.diagram.name);
    if (name) {
      void app.newProject(name).then(refreshPicker);
    }
  });

  await refreshPicker().catch(() => {
    // Service unreachable: the editor still works as a scratch pad.
  });
}

void boot();
